"""Machine-readable coverage table: one row per displayed relation, mapping
its tag to the identity id (or operation) that checks it.

The suite runner and CI both consume this file; a tag whose identity id is
neither registered nor an importable operation fails the completeness test.
"""

from __future__ import annotations

import importlib
from dataclasses import dataclass
from importlib import resources

from .registry import REGISTRY


@dataclass(frozen=True)
class CoverageRow:
    tag: str
    identity_id: str
    suite: str

    @property
    def is_operation(self) -> bool:
        return self.identity_id.startswith("op:")


def load_coverage() -> list[CoverageRow]:
    text = (
        resources.files("mu_lab").joinpath("coverage_table.tsv").read_text()
    )
    rows = []
    for line in text.splitlines()[1:]:
        line = line.strip()
        if not line:
            continue
        tag, ident, suite = line.split("\t")
        rows.append(CoverageRow(tag, ident, suite))
    return rows


def check_coverage() -> list[str]:
    """Return a list of problems (empty = every tag has a registered check)."""
    problems = []
    seen = set()
    for row in load_coverage():
        if row.tag in seen:
            problems.append(f"duplicate tag {row.tag}")
        seen.add(row.tag)
        if row.is_operation:
            path = row.identity_id[3:]
            mod_name, _, attr = path.rpartition(".")
            try:
                mod = importlib.import_module(mod_name)
            except ImportError:
                problems.append(f"{row.tag}: module {mod_name} missing")
                continue
            if not hasattr(mod, attr):
                problems.append(f"{row.tag}: operation {path} missing")
        elif row.identity_id not in REGISTRY:
            problems.append(
                f"{row.tag}: identity {row.identity_id} not registered"
            )
    return problems
