from setuptools import setup

setup(
    name='iwacoh',
    version='0.1.0',
    packages=[
        'iwacoh',
        'iwacoh.tests',
    ],
    license='MIT',
    python_requires='>=3.8',
    long_description=open('README.md', encoding='utf-8').read(),
    install_requires=[
        'numpy',
        'click',
        'tqdm',
        'joblib',
    ],
    extras_require={
        'test': ['pytest', 'hypothesis'],
    },
    entry_points={
        'console_scripts': ['iwacoh=iwacoh.cli:main'],
    },
)
