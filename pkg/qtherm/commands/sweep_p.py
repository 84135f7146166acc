import math
import time

from ..py.bounds import analyze, landauer_term
from ..py.console import log, warn
from ..py.errors import DegenerateDiagonalsError, ScanExhaustedError
from ..py.problem_spec import load_sweep
from ..py.report_store import atomic_save_csv, format_float
from . import map_grid

SCAN_FAILED = "scan_failed"


class SweepPCommand:
    """Landauer term, excess bound and total along a p-grid for two fixed qubit signals."""

    NAME = "sweep-p"
    FUNCTION = "run"
    DESCRIPTION = "Sweep the signal probability p for the ensemble {(p, v1), (1 - p, v2)} and write a CSV."
    ARGUMENTS = (
        (("sweep_path",), {"help": "Sweep document (JSON) with v1, v2 and a p-grid"}),
        (("-o", "--out"), {"dest": "out_csv", "required": True, "help": "Output CSV path"}),
    )
    HEADER = ("p", "landauer_kT", "epsilon_kT", "total_kT", "verdict")

    @staticmethod
    def evaluate(sweep, p):
        """(p, landauer, epsilon, total, verdict); a failed scan keeps the Landauer term."""
        e = sweep.ensemble_at(p)
        try:
            report = analyze(e, sweep.operation, sweep.scan)
        except (ScanExhaustedError, DegenerateDiagonalsError) as err:
            warn("QTherm", f"p={p:.6g}: {err}")
            return (p, landauer_term(e, sweep.operation), math.nan, math.nan, SCAN_FAILED)
        return (p, report.landauer_kT, report.epsilon_lower_kT, report.total_lower_kT, report.verdict.kind.value)

    def run(self, sweep_path, out_csv):
        sweep = load_sweep(sweep_path, require="p")
        start = time.perf_counter()
        rows = map_grid(lambda p: self.evaluate(sweep, p), sweep.p_values, desc="sweep-p")

        failed = sum(1 for row in rows if row[-1] == SCAN_FAILED)
        if failed:
            warn("QTherm", f"{failed} of {len(rows)} points failed the dephasing scan")

        lines = [[format_float(x) for x in row[:-1]] + [row[-1]] for row in rows]
        if not atomic_save_csv(out_csv, self.HEADER, lines, log_prefix="QTherm"):
            return 1
        log("QTherm", f"{len(rows)} rows written to: {out_csv} ({time.perf_counter() - start:.2f}s)")
        return 0
