"""The five example tables shipped with the package (``gllm/data/*.csv``).

========== ====================================================================
name       factors
========== ====================================================================
personality P personality type (A/B), C cholesterol, D diastolic blood pressure
classroom  behaviour, adversity (of school), risk
infant     clinic, care (pre-natal), survival
accident   A accident type, D driver ejected, I injury
wam        a attendance, b sex, c school, d agree, e subject preference, f plans
========== ====================================================================
"""
from importlib import resources

from gllm.table import ContingencyTable, read_csv

NAMES = ("personality", "classroom", "infant", "accident", "wam")


def path(name: str):
    if name not in NAMES:
        raise KeyError(f"no bundled dataset {name!r}; choose from {', '.join(NAMES)}")
    return resources.files("gllm") / "data" / f"{name}.csv"


def load(name: str) -> ContingencyTable:
    with path(name).open("r", encoding="utf-8", newline="") as fh:
        return read_csv(fh)
