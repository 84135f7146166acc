import math
import time

from ..py.bounds import analyze
from ..py.console import log, warn
from ..py.errors import DegenerateDiagonalsError, ScanExhaustedError
from ..py.problem_spec import load_sweep
from ..py.qmat import bloch_ket
from ..py.reversibility import VerdictKind
from ..py.report_store import atomic_save_csv, format_float
from . import map_grid


class BlochScanCommand:
    """Where on the Bloch sphere a second pure signal keeps the operation reversible."""

    NAME = "bloch-scan"
    FUNCTION = "run"
    DESCRIPTION = "Scan v2 over a (theta, phi) grid with v1 and p fixed; feasible = 1 where a stochastic map exists."
    ARGUMENTS = (
        (("sweep_path",), {"help": "Sweep document (JSON) with v1, p and a Bloch grid"}),
        (("-o", "--out"), {"dest": "out_csv", "required": True, "help": "Output CSV path"}),
    )
    HEADER = ("theta", "phi", "feasible", "epsilon_kT")

    @staticmethod
    def evaluate(sweep, point):
        """(theta, phi, feasible, epsilon, failed)."""
        theta, phi = point
        e = sweep.ensemble_at(sweep.p, bloch_ket(theta, phi))
        try:
            report = analyze(e, sweep.operation, sweep.scan)
        except (ScanExhaustedError, DegenerateDiagonalsError):
            return (theta, phi, 0, math.nan, True)
        feasible = 1 if report.verdict.kind is VerdictKind.REVERSIBLE else 0
        return (theta, phi, feasible, report.epsilon_lower_kT, False)

    def run(self, sweep_path, out_csv):
        sweep = load_sweep(sweep_path, require="bloch")
        start = time.perf_counter()
        rows = map_grid(lambda point: self.evaluate(sweep, point), sweep.bloch_grid(), desc="bloch-scan")

        failed = sum(1 for row in rows if row[-1])
        if failed:
            warn("QTherm", f"{failed} of {len(rows)} grid points failed the dephasing scan")

        lines = [[format_float(theta), format_float(phi), str(feasible), format_float(eps)]
                 for theta, phi, feasible, eps, _ in rows]
        if not atomic_save_csv(out_csv, self.HEADER, lines, log_prefix="QTherm"):
            return 1
        n_feasible = sum(row[2] for row in rows)
        log("QTherm", f"{n_feasible} of {len(rows)} grid points feasible; written to: {out_csv} "
                      f"({time.perf_counter() - start:.2f}s)")
        return 0
