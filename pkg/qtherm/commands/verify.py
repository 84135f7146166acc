from ..py.console import fail, log, ok
from ..py.report_store import atomic_save, render_json
from ..py.verification import run_verification


class VerifyCommand:
    """Seeded numerical verification of the identities and bounds the library relies on."""

    NAME = "verify"
    FUNCTION = "run"
    DESCRIPTION = "Run the randomized verification suite; exit 1 if any check fails."
    ARGUMENTS = (
        (("--seed",), {"type": int, "default": 0, "help": "Seed for numpy.random.default_rng"}),
        (("--trials-scale",), {"dest": "trials_scale", "type": float, "default": 1.0,
                               "help": "Multiply every check's trial count (e.g. 0.1 for a smoke run)"}),
        (("-o", "--out"), {"dest": "out_path", "default": None,
                           "help": "Write the summary here instead of stdout"}),
    )

    def run(self, seed=0, trials_scale=1.0, out_path=None, corrupt_unitary=False):
        summary = run_verification(seed=seed, trials_scale=trials_scale, corrupt_unitary=corrupt_unitary)

        if out_path:
            if not atomic_save(out_path, summary, log_prefix="Verify"):
                return 1
            log("Verify", f"Summary written to: {out_path}")
        else:
            print(render_json(summary))

        failed = [c["name"] for c in summary["checks"] if not c["passed"]]
        if failed:
            fail("Verify", f"{len(failed)} check(s) failed: {', '.join(failed)}")
            return 1
        ok("Verify", f"all {len(summary['checks'])} checks passed in {summary['elapsed_s']:.1f}s")
        return 0
