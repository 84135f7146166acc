import time

from ..py.bounds import analyze
from ..py.console import log, warn
from ..py.problem_spec import load_problem
from ..py.report_store import atomic_save, render_json


class AnalyzeCommand:
    """Full thermodynamic report for one ensemble and one operation."""

    NAME = "analyze"
    FUNCTION = "run"
    DESCRIPTION = "Decide reversibility and bound the excess cost for one problem document."
    ARGUMENTS = (
        (("problem_path",), {"help": "Problem document (JSON)"}),
        (("-o", "--out"), {"dest": "out_path", "default": None,
                           "help": "Write the report here instead of stdout"}),
    )

    def run(self, problem_path, out_path=None):
        problem = load_problem(problem_path)
        start = time.perf_counter()
        report = analyze(problem.ensemble, problem.operation, problem.scan)
        log("QTherm", f"{report.verdict.kind.value}: total >= {report.total_lower_kT:.6g} kT "
                      f"({time.perf_counter() - start:.2f}s)")
        for message in report.warnings:
            warn("QTherm", message)

        document = report.to_dict()
        if out_path:
            if not atomic_save(out_path, document, log_prefix="QTherm"):
                return 1
            log("QTherm", f"Report written to: {out_path}")
        else:
            print(render_json(document))
        return 0
