"""Workspaces: groups, modules, complexes and tasks declared in one JSON file.

A workspace looks like::

    {
      "schema": "iwacoh-workspace/1",
      "ring": {"p": 2, "e": 1},
      "config": {"degree_cap": 3},
      "groups": {"G": "cyclic:2", "K": {"table": [[0, 1], [1, 0]]}},
      "modules": {"M": {"group": "G", "exps": [1]}},
      "complexes": {"X": {"terms": {"0": "M", "1": "M"}, "diffs": {"0": [[0]]}}},
      "towers": {"T": {"cyclic_p": {"p": 2, "depth": 4}, "window": 1}},
      "local_data": {"S": {"group": "G", "places": [{"subgroup": [0]}]}},
      "tasks": [{"kind": "cohomology", "module": "M", "degrees": [0, 2]}]
    }

Matrices are row-major nested integer lists; an action lists one matrix per
group element.  Every name is resolved and every object is built (and so
validated) when the file is loaded.
"""
import copy
import dataclasses
import json
import logging
import pathlib
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from .cochains import Coefficients, Cochain, CochainComplex, as_complex, format_cochain, shapiro_map
from .compact import LocalDatum, Place, compact_les, duality_triangle, shapiro_compact
from .complexes import Complex, complex_from_modules, is_quasi_iso
from .config import make_config
from .errors import IwacohError, NotStabilized, ParseError, ValidationError
from .groups import FiniteGroup, from_name
from .induction import (TowerReport, cyclic_module_tower, cyclic_p_tower, iwasawa_cohomology,
                        tower_colim_cohomology, tower_from_subgroups, tower_lim_cohomology)
from .linalg import RingSpec
from .modules import (Character, GModule, direct_sum, dual_module, induced_module, trivial_module,
                      twist_by_character)
from .oracles import cohomology_oracle, tate_oracle
from .tate import finite_duality_check, tate_table

logger = logging.getLogger(__name__)

SCHEMA = "iwacoh-workspace/1"
REPORT_SCHEMA = "iwacoh-report/1"
TASK_KINDS = ("cohomology", "tate", "shapiro", "duality", "tower", "compact", "verify")
TOWER_LIMITS = ("colim", "iwasawa", "lim")

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"

_REQUIRED = object()


@dataclass
class Task:
    kind: str
    params: Dict[str, Any]
    path: str
    group: Optional[FiniteGroup] = None
    coefficients: Optional[Coefficients] = None
    subgroup: Optional[Tuple[int, ...]] = None
    tower: Any = None
    datum: Optional[LocalDatum] = None
    degrees: Optional[Tuple[int, int]] = None
    options: Dict[str, Any] = field(default_factory=dict)


@dataclass
class Workspace:
    ring: RingSpec
    config: Any
    groups: Dict[str, FiniteGroup] = field(default_factory=dict)
    modules: Dict[str, GModule] = field(default_factory=dict)
    complexes: Dict[str, Complex] = field(default_factory=dict)
    towers: Dict[str, Any] = field(default_factory=dict)
    local_data: Dict[str, LocalDatum] = field(default_factory=dict)
    tasks: List[Task] = field(default_factory=list)

    @classmethod
    def empty(cls, ring: RingSpec = None, cfg=None) -> "Workspace":
        return cls(ring or RingSpec(2, 1), cfg or make_config())

    def select(self, kinds) -> "Workspace":
        return dataclasses.replace(self, tasks=[t for t in self.tasks if t.kind in kinds])

    def with_degrees(self, lo: int, hi: int) -> "Workspace":
        """Override the degree range of every task that has one."""
        if hi < lo:
            raise ValidationError("empty degree range %d..%d" % (lo, hi))
        tasks = []
        for t in self.tasks:
            if t.degrees is not None:
                params = dict(t.params, degrees=[lo, hi])
                params.pop("degree", None)
                t = dataclasses.replace(t, params=params, degrees=(lo, hi))
                _check_degrees(t, self.config)
            tasks.append(t)
        return dataclasses.replace(self, tasks=tasks)


# reports

@dataclass
class TaskResult:
    kind: str
    inputs: Dict[str, Any]
    results: Dict[str, Any] = field(default_factory=dict)
    witnesses: Dict[str, Any] = field(default_factory=dict)
    verdict: str = PASS
    message: str = ""

    def fail(self, message: str):
        self.verdict = FAIL
        self.message = "; ".join(x for x in (self.message, message) if x)

    def to_dict(self) -> Dict[str, Any]:
        return _plain(dataclasses.asdict(self))


@dataclass
class Report:
    seed: int
    tasks: List[TaskResult] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        verdicts = {t.verdict for t in self.tasks}
        if FAIL in verdicts:
            return FAIL
        if INCONCLUSIVE in verdicts:
            return INCONCLUSIVE
        return PASS

    @property
    def exit_code(self) -> int:
        return 0 if self.verdict == PASS else 1

    def to_dict(self) -> Dict[str, Any]:
        return {"schema": REPORT_SCHEMA, "seed": int(self.seed), "verdict": self.verdict,
                "tasks": [t.to_dict() for t in self.tasks]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = ["iwacoh report (seed %d): %s" % (self.seed, self.verdict)]
        for k, t in enumerate(self.tasks, 1):
            lines.append("[%d] %s: %s" % (k, t.kind, t.verdict))
            for key in sorted(t.results):
                value = t.results[key]
                if isinstance(value, dict):
                    value = ", ".join("%s: %s" % (a, value[a]) for a in sorted(value))
                lines.append("    %s = %s" % (key, value))
            if t.message:
                lines.append("    note: %s" % t.message)
        return "\n".join(lines) + "\n"


def _plain(obj):
    """numpy scalars and arrays to JSON-ready Python values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


# parsing

@contextmanager
def _at(path: str):
    """Attach a workspace path to errors raised while building one object."""
    try:
        yield
    except ValidationError as exc:
        if exc.field:
            raise
        raise ValidationError(str(exc), path) from exc
    except (IwacohError, ValueError, TypeError) as exc:
        raise ValidationError("%s: %s" % (type(exc).__name__, exc), path) from exc


def _object(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise ValidationError("expected an object, got %s" % type(value).__name__, path)
    return value


def _field(obj: dict, key: str, path: str, types=None, default=_REQUIRED):
    if key not in obj:
        if default is _REQUIRED:
            raise ValidationError("missing field %r" % key, path)
        return default
    value = obj[key]
    if types is not None and (not isinstance(value, types) or isinstance(value, bool) and types is not bool):
        raise ValidationError("expected %s, got %r" % (getattr(types, "__name__", types), value),
                              "%s.%s" % (path, key))
    return value


def _ints(value, path: str) -> Tuple[int, ...]:
    if not isinstance(value, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in value):
        raise ValidationError("expected a list of integers", path)
    return tuple(value)


def _array(value, shape, path: str) -> np.ndarray:
    try:
        arr = np.array(value, dtype=np.int64)
    except (ValueError, TypeError):
        raise ValidationError("expected a nested list of integers", path)
    if arr.size != int(np.prod(shape)):
        raise ValidationError("expected shape %s, got %s" % (tuple(shape), arr.shape), path)
    return arr.reshape(shape)


def _check_degrees(task: Task, cfg):
    lo, hi = task.degrees
    path = task.path + ".degrees"
    if task.kind == "tate":
        if lo < -cfg.tate_depth or hi > cfg.degree_cap:
            raise ValidationError("Tate degrees %d..%d leave %d..%d" % (lo, hi, -cfg.tate_depth, cfg.degree_cap),
                                  path)
    elif task.kind == "duality" and task.datum is None:
        if max(abs(lo), abs(hi)) + 1 > cfg.degree_cap:
            raise ValidationError("duality degrees need |n| + 1 <= %d" % cfg.degree_cap, path)
    elif hi > cfg.degree_cap:
        raise ValidationError("degree %d exceeds the cap %d" % (hi, cfg.degree_cap), path)


class _Loader:
    """Resolves names on demand so declarations may appear in any order."""

    SECTIONS = ("groups", "modules", "complexes", "towers", "local_data")
    SINGULAR = {"groups": "group", "modules": "module", "complexes": "complex", "towers": "tower",
                "local_data": "local datum"}

    def __init__(self, doc):
        doc = _object(doc, "workspace")
        schema = _field(doc, "schema", "workspace", str)
        if schema != SCHEMA:
            raise ValidationError("unsupported schema %r, expected %r" % (schema, SCHEMA), "schema")
        unknown = set(doc) - {"schema", "ring", "config", "tasks"} - set(self.SECTIONS)
        if unknown:
            raise ValidationError("unknown sections %s" % sorted(unknown), "workspace")
        ring = _object(_field(doc, "ring", "workspace"), "ring")
        with _at("ring"):
            self.ring = RingSpec(_field(ring, "p", "ring", int), _field(ring, "e", "ring", int))
        with _at("config"):
            self.cfg = make_config(**_object(doc.get("config", {}), "config"))
        self.raw = {s: _object(doc.get(s, {}), s) for s in self.SECTIONS}
        self.built = {s: {} for s in self.SECTIONS}
        self._resolving = set()
        self.task_specs = doc.get("tasks", [])
        if not isinstance(self.task_specs, list):
            raise ValidationError("expected a list of tasks", "tasks")

    def load(self) -> Workspace:
        for section in self.SECTIONS:
            for name in self.raw[section]:
                self._get(section, name, section)
        tasks = [self._task(k, spec) for k, spec in enumerate(self.task_specs)]
        w = Workspace(self.ring, self.cfg, self.built["groups"], self.built["modules"],
                      self.built["complexes"], self.built["towers"], self.built["local_data"], tasks)
        logger.info("workspace over %s: %d groups, %d modules, %d tasks", self.ring, len(w.groups),
                    len(w.modules), len(tasks))
        return w

    def _get(self, section: str, name, path: str):
        singular = self.SINGULAR[section]
        if not isinstance(name, str) or name not in self.raw[section]:
            raise ValidationError("unknown %s %r" % (singular, name), path)
        if name in self.built[section]:
            return self.built[section][name]
        where = "%s.%s" % (section, name)
        if (section, name) in self._resolving:
            raise ValidationError("circular reference", where)
        self._resolving.add((section, name))
        with _at(where):
            obj = getattr(self, "_build_" + section)(name, self.raw[section][name], where)
        self._resolving.discard((section, name))
        self.built[section][name] = obj
        return obj

    def group(self, name, path):
        return self._get("groups", name, path)

    def module(self, name, path):
        return self._get("modules", name, path)

    # sections

    def _build_groups(self, name, spec, path):
        if isinstance(spec, str):
            return from_name(spec, self.cfg)
        spec = _object(spec, path)
        if "builtin" in spec:
            return from_name(_field(spec, "builtin", path, str), self.cfg)
        table = _field(spec, "table", path, list)
        return FiniteGroup(table, label=spec.get("label", name), cfg=self.cfg)

    def _build_modules(self, name, spec, path):
        spec = _object(spec, path)
        if "dual" in spec:
            m = dual_module(self.module(spec["dual"], path + ".dual"))
        elif "induced" in spec:
            base = self.module(spec["induced"], path + ".induced")
            with _at(path + ".subgroup"):
                m = induced_module(base, _ints(_field(spec, "subgroup", path), path + ".subgroup"))
        elif "sum" in spec:
            parts = _field(spec, "sum", path, list)
            if not parts:
                raise ValidationError("a direct sum needs at least one summand", path + ".sum")
            m = direct_sum(*[self.module(p, "%s.sum[%d]" % (path, k)) for k, p in enumerate(parts)])[0]
        else:
            g = self.group(_field(spec, "group", path), path + ".group")
            exps = _ints(_field(spec, "exps", path), path + ".exps")
            action = spec.get("action")
            if action is not None:
                action = _array(action, (g.order, len(exps), len(exps)), path + ".action")
            with _at(path + ".action"):
                m = GModule(self.ring, exps, g, action)
            if "character" in spec:
                with _at(path + ".character"):
                    m = twist_by_character(m, Character(g, _ints(spec["character"], path), self.ring))
        m.label = name
        return m

    def _build_complexes(self, name, spec, path):
        spec = _object(spec, path)
        terms = _object(_field(spec, "terms", path), path + ".terms")
        if not terms:
            raise ValidationError("a complex needs at least one term", path + ".terms")
        modules = {}
        for key, ref in terms.items():
            modules[self._degree_key(key, path + ".terms")] = self.module(ref, "%s.terms.%s" % (path, key))
        diffs = {}
        for key, mat in _object(spec.get("diffs", {}), path + ".diffs").items():
            i = self._degree_key(key, path + ".diffs")
            src, tgt = modules.get(i), modules.get(i + 1)
            if src is None or tgt is None:
                raise ValidationError("d^%d needs terms in degrees %d and %d" % (i, i, i + 1), path + ".diffs")
            diffs[i] = _array(mat, (tgt.rank, src.rank), "%s.diffs.%s" % (path, key))
        with _at(path + ".diffs"):
            return complex_from_modules(modules, diffs, label=name)

    @staticmethod
    def _degree_key(key: str, path: str) -> int:
        try:
            return int(key)
        except ValueError:
            raise ValidationError("degree keys must be integers, got %r" % key, path)

    def _build_towers(self, name, spec, path):
        spec = _object(spec, path)
        window = _field(spec, "window", path, int, self.cfg.window)
        if "cyclic_p" in spec:
            cp = _object(spec["cyclic_p"], path + ".cyclic_p")
            return cyclic_p_tower(_field(cp, "p", path + ".cyclic_p", int),
                                  _field(cp, "depth", path + ".cyclic_p", int, self.cfg.tower_levels),
                                  window, self.cfg)
        g = self.group(_field(spec, "group", path), path + ".group")
        subs = _field(spec, "subgroups", path, list)
        return tower_from_subgroups(g, [_ints(u, "%s.subgroups[%d]" % (path, k)) for k, u in enumerate(subs)],
                                    window)

    def _build_local_data(self, name, spec, path):
        spec = _object(spec, path)
        g = self.group(_field(spec, "group", path), path + ".group")
        places = []
        for k, p in enumerate(_field(spec, "places", path, list)):
            where = "%s.places[%d]" % (path, k)
            p = _object(p, where)
            tate = _field(p, "tate", where, bool, False)
            label = _field(p, "label", where, str, None)
            with _at(where):
                if "subgroup" in p:
                    h, images = g.subgroup(_ints(p["subgroup"], where + ".subgroup"))
                else:
                    h = self.group(_field(p, "group", where), where + ".group")
                    images = _ints(_field(p, "images", where), where + ".images")
                places.append(Place(h, np.asarray(images), tate, label))
        return LocalDatum(g, places)

    # tasks

    def _task(self, index: int, spec) -> Task:
        path = "tasks[%d]" % index
        spec = _object(spec, path)
        kind = _field(spec, "kind", path, str)
        if kind not in TASK_KINDS:
            raise ValidationError("unknown task kind %r" % kind, path + ".kind")
        task = Task(kind, copy.deepcopy(spec), path)
        getattr(self, "_task_" + kind)(task, spec, path)
        if task.degrees is not None:
            _check_degrees(task, self.cfg)
        return task

    def _coefficients(self, task: Task, spec, path, group=None):
        """Module or complex by name, or inline trivial coefficients {"exps": [...]}."""
        ref = _field(spec, "module", path)
        where = path + ".module"
        if isinstance(ref, dict):
            if group is None:
                raise ValidationError("inline coefficients need a group", where)
            with _at(where):
                return trivial_module(self.ring, _ints(_field(ref, "exps", where), where + ".exps"), group)
        if isinstance(ref, str) and ref in self.raw["complexes"]:
            return self._get("complexes", ref, where)
        if not isinstance(ref, str) or ref not in self.raw["modules"]:
            raise ValidationError("unknown module %r" % (ref,), where)
        return self.module(ref, where)

    def _task_group(self, task: Task, spec, path, group=None):
        if "group" in spec:
            group = self.group(spec["group"], path + ".group")
        task.coefficients = self._coefficients(task, spec, path, group)
        if group is None:
            group = task.coefficients.group
        elif task.coefficients.group != group:
            raise ValidationError("coefficients are modules for %s, not %s"
                                  % (task.coefficients.group.label, group.label), path + ".module")
        task.group = group

    def _degrees(self, task: Task, spec, path, default: Tuple[int, int]):
        if "degree" in spec:
            d = _field(spec, "degree", path, int)
            task.degrees = (d, d)
        elif "degrees" in spec:
            pair = _ints(spec["degrees"], path + ".degrees")
            if len(pair) != 2 or pair[0] > pair[1]:
                raise ValidationError("expected [lo, hi] with lo <= hi", path + ".degrees")
            task.degrees = pair
        else:
            task.degrees = default

    def _expect(self, spec, path) -> Dict[str, str]:
        expect = _object(spec.get("expect", {}), path + ".expect")
        for key, value in expect.items():
            self._degree_key(key, path + ".expect")
            if not isinstance(value, str):
                raise ValidationError("expected values are strings like \"Z/2 ⊕ Z/4\"", path + ".expect." + key)
        return expect

    def _subgroup(self, task: Task, spec, path, normal: bool = False):
        where = path + ".subgroup"
        with _at(where):
            elems = _ints(_field(spec, "subgroup", path), where)
            task.subgroup = task.group.check_normal(elems) if normal else task.group.check_subgroup(elems)

    def _datum(self, task: Task, spec, path):
        task.datum = self._get("local_data", spec["local_datum"], path + ".local_datum")
        if task.datum.group != task.group:
            raise ValidationError("local datum is over %s but the coefficients over %s"
                                  % (task.datum.group.label, task.group.label), path + ".local_datum")

    def _task_cohomology(self, task, spec, path):
        self._task_group(task, spec, path)
        self._degrees(task, spec, path, (0, self.cfg.degree_cap))
        task.options = {"expect": self._expect(spec, path),
                        "oracle": _field(spec, "oracle", path, bool, False)}

    def _task_tate(self, task, spec, path):
        self._task_group(task, spec, path)
        self._degrees(task, spec, path, (-self.cfg.tate_depth, self.cfg.degree_cap))
        task.options = {"expect": self._expect(spec, path),
                        "oracle": _field(spec, "oracle", path, bool, False)}

    def _task_shapiro(self, task, spec, path):
        self._task_group(task, spec, path)
        if "local_datum" in spec:
            self._datum(task, spec, path)
        self._subgroup(task, spec, path, normal=task.datum is not None)
        self._degrees(task, spec, path, (0, self.cfg.degree_cap - 1))

    def _task_duality(self, task, spec, path):
        self._task_group(task, spec, path)
        if not isinstance(task.coefficients, GModule):
            raise ValidationError("duality needs a module, not a complex", path + ".module")
        if "local_datum" in spec:
            self._datum(task, spec, path)
            self._degrees(task, spec, path, (0, self.cfg.degree_cap - 1))
            task.options = {"trace_degree": _field(spec, "trace_degree", path, int, task.degrees[1])}
        else:
            n = self.cfg.degree_cap - 1
            self._degrees(task, spec, path, (-n, n))

    def _task_tower(self, task, spec, path):
        limit = _field(spec, "limit", path, str, "colim")
        if limit not in TOWER_LIMITS:
            raise ValidationError("unknown limit %r, expected one of %s" % (limit, TOWER_LIMITS), path + ".limit")
        degree = _field(spec, "degree", path, int)
        if degree > self.cfg.degree_cap:
            raise ValidationError("degree %d exceeds the cap %d" % (degree, self.cfg.degree_cap), path + ".degree")
        task.options = {"limit": limit, "degree": degree, "window": _field(spec, "window", path, int, None)}
        if limit == "lim":
            task.group = self.group(_field(spec, "group", path), path + ".group")
            depth = _field(spec, "depth", path, int, min(self.cfg.tower_levels, self.ring.e))
            with _at(path + ".depth"):
                task.options["modules"] = cyclic_module_tower(self.ring, task.group, depth)
            return
        task.tower = self._get("towers", _field(spec, "tower", path), path + ".tower")
        self._task_group(task, spec, path, task.tower.group)

    def _task_compact(self, task, spec, path):
        self._task_group(task, spec, path)
        _field(spec, "local_datum", path)
        self._datum(task, spec, path)
        if "subgroup" in spec:
            self._subgroup(task, spec, path, normal=True)
        lo = as_complex(task.coefficients).lo
        self._degrees(task, spec, path, (lo, lo + self.cfg.degree_cap - 1))

    def _task_verify(self, task, spec, path):
        from .verify import SUITES
        suites = spec.get("suites", list(SUITES))
        if not isinstance(suites, list) or not all(isinstance(s, str) for s in suites):
            raise ValidationError("expected a list of suite names", path + ".suites")
        for s in suites:
            if s not in SUITES:
                raise ValidationError("unknown suite %r" % s, path + ".suites")
        cases = spec.get("cases")
        if isinstance(cases, int) and not isinstance(cases, bool):
            cases = {s: cases for s in SUITES}
        with _at(path + ".cases"):
            cfg = make_config(self.cfg, random_cases=cases) if cases else self.cfg
        task.options = {"suites": suites, "config": cfg}


def loads_workspace(text: str) -> Workspace:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno)
    return load_workspace(doc)


def load_workspace(doc) -> Workspace:
    return _Loader(doc).load()


def parse_workspace(path) -> Workspace:
    path = pathlib.Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError("cannot read workspace %s: %s" % (path, exc.strerror))
    return loads_workspace(text)


# running

def _check_expected(result: TaskResult, expect: Dict[str, str], i: int, value, name: str):
    want = expect.get(str(i))
    if want is not None and want != str(value):
        result.fail("expected %s^%d = %s, got %s" % (name, i, want, value))


def _run_cohomology(w: Workspace, task: Task, result: TaskResult, seed: int):
    g, m = task.group, task.coefficients
    x = as_complex(m)
    lo, hi = task.degrees
    cx = CochainComplex(g, x, max(hi - x.lo + 1, 1), w.config)
    for i in range(lo, hi + 1):
        h = cx.cohomology(i)
        key = "H^%d" % i
        result.results[key] = str(h.invariants)
        _check_expected(result, task.options["expect"], i, h.invariants, "H")
        if not isinstance(m, GModule) or i < 0:
            continue
        result.witnesses[key] = [format_cochain(Cochain.from_vector(g, m, i, v)) for v in h.basis()]
        if task.options["oracle"]:
            oracle = cohomology_oracle(g, m, i, w.config)
            if oracle != h.invariants:
                result.fail("H^%d is %s but enumeration gives %s" % (i, h.invariants, oracle))


def _run_tate(w: Workspace, task: Task, result: TaskResult, seed: int):
    g, m = task.group, task.coefficients
    lo, hi = task.degrees
    for i, h in tate_table(g, m, lo, hi, w.config).items():
        result.results["Ĥ^%d" % i] = str(h)
        _check_expected(result, task.options["expect"], i, h, "Ĥ")
        if task.options["oracle"] and isinstance(m, GModule) and i in (0, -1):
            oracle = tate_oracle(m, i, w.config)
            if oracle != h:
                result.fail("Ĥ^%d is %s but enumeration gives %s" % (i, h, oracle))


def _run_shapiro(w: Workspace, task: Task, result: TaskResult, seed: int):
    g, x = task.group, as_complex(task.coefficients)
    lo, hi = task.degrees
    top = hi - x.lo + 1
    if task.datum is None:
        sh = shapiro_map(g, task.subgroup, x, top, w.config)
        report = is_quasi_iso(sh, range(lo, hi + 1))
        suffix = ""
    else:
        comparison = shapiro_compact(task.datum, task.subgroup, x, top, w.config)
        sh, report = comparison.sh, comparison.report
        suffix = "_c"
        result.witnesses["local"] = [r.ok for r in comparison.local_reports]
        result.witnesses["cor_res"] = {str(i): ok for i, ok in comparison.cor_res.items()}
        if not comparison.ok:
            result.fail("a local comparison or cor o res = index check failed")
    for j in range(lo, hi + 1):
        result.results["H^%d%s(G, M_U)" % (j, suffix)] = str(sh.source.cohomology(j).invariants)
        result.results["H^%d%s(U, M)" % (j, suffix)] = str(sh.target.cohomology(j).invariants)
    result.witnesses["bijective"] = {str(j): report.bijective.get(j) for j in range(lo, hi + 1)}
    if not report.ok:
        bad = [j for j, ok in report.bijective.items() if not ok]
        result.fail("Shapiro map is not bijective on H^j for j in %s" % bad)


def _run_duality(w: Workspace, task: Task, result: TaskResult, seed: int):
    g, m = task.group, task.coefficients
    lo, hi = task.degrees
    if task.datum is not None:
        dt = duality_triangle(task.datum, m, task.options["trace_degree"], hi + 1, cfg=w.config)
        result.results["rows"] = {row: "quasi-iso" if ok else "not quasi-iso" for row, ok in dt.report.rows.items()}
        result.results["window"] = "%d..%d" % dt.report.window
        result.witnesses["proved"] = dt.report.proved
        result.witnesses["trace"] = {"degree": dt.trace.degree, "target": list(dt.trace.target.exps)}
        return
    perfect = {}
    for n in range(lo, hi + 1):
        rep = finite_duality_check(g, m, n, w.config)
        result.results["Ĥ^%d(M)" % n] = str(rep.left)
        result.results["Ĥ^%d(M^∨)" % (-n - 1)] = str(rep.right)
        perfect[str(n)] = rep.pairing_perfect
        if not rep.orders_equal:
            result.fail("|Ĥ^%d(M)| = %d but |Ĥ^%d(M^∨)| = %d" % (n, rep.left.order, -n - 1, rep.right.order))
        elif rep.pairing_perfect is False:
            result.fail("cup pairing in degree %d is degenerate" % n)
    result.witnesses["pairing_perfect"] = perfect


def _tower_fields(result: TaskResult, report: TowerReport):
    result.witnesses["levels"] = [str(h) for h in report.levels]
    result.witnesses["image_orders"] = list(report.image_orders)
    result.witnesses["cofinality_assumed"] = report.cofinality_assumed
    if report.checks:
        result.witnesses["checks"] = {k: {str(a): b for a, b in v.items()} if isinstance(v, dict) else v
                                      for k, v in report.checks.items()}


def _run_tower(w: Workspace, task: Task, result: TaskResult, seed: int):
    opts = task.options
    i = opts["degree"]
    try:
        if opts["limit"] == "lim":
            modules, transitions = opts["modules"]
            window = opts["window"] or w.config.window
            report = tower_lim_cohomology(task.group, modules, transitions, i, window, w.config)
        else:
            t = task.tower
            if opts["window"]:
                t = dataclasses.replace(t, window=opts["window"])
            compute = tower_colim_cohomology if opts["limit"] == "colim" else iwasawa_cohomology
            report = compute(t, task.coefficients, i, w.config)
    except NotStabilized as exc:
        if exc.report is not None:
            _tower_fields(result, exc.report)
        raise
    _tower_fields(result, report)
    result.results["%s H^%d" % (report.kind, i)] = str(report.value)
    result.results["stabilized_at"] = report.stabilized_at


def _run_compact(w: Workspace, task: Task, result: TaskResult, seed: int):
    x = as_complex(task.coefficients)
    lo, hi = task.degrees
    les = compact_les(task.datum, x, hi - x.lo + 1, w.config)
    for i in range(max(lo, les.lo), hi + 1):
        result.results["H^%d_c" % i] = str(les.groups["c", i])
    result.witnesses["les"] = ["%s = %s" % (label, h) for label, h in les.rows()]
    if task.subgroup is not None:
        comparison = shapiro_compact(task.datum, task.subgroup, x, hi - x.lo + 1, w.config)
        result.results["shapiro_c"] = "quasi-iso" if comparison.report.ok else "not quasi-iso"
        if not comparison.ok:
            result.fail("compact Shapiro comparison failed")


def _run_verify(w: Workspace, task: Task, result: TaskResult, seed: int):
    from .verify import run_suites
    for outcome in run_suites(task.options["config"], task.options["suites"], seed):
        result.results[outcome.name] = "%d/%d exact" % (outcome.cases - len(outcome.failures), outcome.cases)
        if outcome.failures:
            result.witnesses[outcome.name] = outcome.failures[:5]
            result.fail("suite %s: %d failures" % (outcome.name, len(outcome.failures)))


RUNNERS = {
    "cohomology": _run_cohomology,
    "tate": _run_tate,
    "shapiro": _run_shapiro,
    "duality": _run_duality,
    "tower": _run_tower,
    "compact": _run_compact,
    "verify": _run_verify,
}


def run_task(w: Workspace, task: Task, seed: int) -> TaskResult:
    result = TaskResult(task.kind, _plain(task.params))
    logger.info("running %s (%s)", task.path, task.kind)
    try:
        RUNNERS[task.kind](w, task, result, seed)
    except NotStabilized as exc:
        result.verdict = INCONCLUSIVE
        result.message = str(exc)
    except IwacohError as exc:
        result.fail("%s: %s" % (type(exc).__name__, exc))
    logger.info("%s: %s", task.path, result.verdict)
    return result


def run(w: Workspace, seed: int = 0, parallel: bool = False, n_jobs: int = -1) -> Report:
    """Execute the tasks in order; with ``parallel`` they run in worker processes."""
    if parallel and len(w.tasks) > 1:
        results = Parallel(n_jobs=n_jobs)(delayed(run_task)(w, t, seed) for t in w.tasks)
    else:
        results = [run_task(w, t, seed) for t in w.tasks]
    return Report(seed, list(results))
