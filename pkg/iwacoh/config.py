"""Run-time knobs shared by every module."""
from .errors import ConfigError


class dotdict(dict):
    """dot.notation access to dictionary attributes"""
    __setattr__ = dict.__setitem__
    __delattr__ = dict.__delitem__

    def __getattr__(self, key):
        # dunder lookups (copy, pickle) must not fall through to dict.get
        if key.startswith("__"):
            raise AttributeError(key)
        return self.get(key)


DEFAULT_CONFIG = dotdict({
    # largest group accepted by FiniteGroup
    "group_order_cap": 24,
    # highest cochain degree whose cohomology may be requested
    "degree_cap": 3,
    # depth of the negative half of Tate complexes
    "tate_depth": 3,
    "tower_levels": 4,
    "window": 1,
    # ambient order up to which the enumeration oracles run
    "enumeration_limit": 4096,
    "seed": 0,
    "random_cases": dotdict({
        "signs": 500,
        "cones": 100,
        "cups": 200,
        "tate": 40,
        "shapiro": 12,
        "duality": 30,
        "towers": 4,
        "compact": 50,
        "triangles": 20,
        "dfm": 50,
    }),
})


def make_config(base=None, **overrides):
    """Copy ``base`` (default: DEFAULT_CONFIG) and apply overrides.

    Nested ``random_cases`` may be overridden with a partial dict.
    """
    src = base if base is not None else DEFAULT_CONFIG
    cfg = dotdict({**src, "random_cases": dotdict(src["random_cases"])})
    for key, value in overrides.items():
        if key not in DEFAULT_CONFIG:
            raise ConfigError("unknown configuration key %r" % key)
        if key == "random_cases":
            for suite, count in dict(value).items():
                if suite not in DEFAULT_CONFIG.random_cases:
                    raise ConfigError("unknown verification suite %r" % suite)
                cfg.random_cases[suite] = int(count)
        else:
            cfg[key] = type(DEFAULT_CONFIG[key])(value)
    return cfg
