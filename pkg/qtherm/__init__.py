"""
qtherm - thermodynamic cost of quantum operations on signal ensembles.
Features: reversibility decision, Landauer term and excess-cost lower bounds, p-sweeps and
Bloch scans for qubit pairs, explicit implementations and a seeded verification suite.
"""
__version__ = "1.0.0"
__license__ = "MIT"

from .commands.analyze import AnalyzeCommand
from .commands.bloch_scan import BlochScanCommand
from .commands.sweep_p import SweepPCommand
from .commands.verify import VerifyCommand

COMMAND_CLASS_MAPPINGS = {
    "analyze":    AnalyzeCommand,
    "sweep-p":    SweepPCommand,
    "bloch-scan": BlochScanCommand,
    "verify":     VerifyCommand,
}

COMMAND_DISPLAY_NAME_MAPPINGS = {
    "analyze":    "Analyze Problem",
    "sweep-p":    "Probability Sweep",
    "bloch-scan": "Bloch Sphere Scan",
    "verify":     "Verification Suite",
}

__all__ = ['COMMAND_CLASS_MAPPINGS', 'COMMAND_DISPLAY_NAME_MAPPINGS', '__version__']
