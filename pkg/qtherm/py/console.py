"""
Console output with bracketed component prefixes, e.g. "[Bounds] ...".

Everything goes to stderr so JSON and CSV written to stdout stay clean.
Warnings are yellow, failures red, passes green.
"""
import sys

from colorama import Fore, Style, just_fix_windows_console
from tqdm.auto import tqdm

just_fix_windows_console()

_state = {"quiet": False}


def set_quiet(quiet):
    """Silence info lines and progress bars. Warnings and failures always print."""
    _state["quiet"] = bool(quiet)


def _emit(prefix, message, color=""):
    reset = Style.RESET_ALL if color else ""
    print(f"{color}[{prefix}]{reset} {message}", file=sys.stderr)


def log(prefix, message):
    if _state["quiet"]:
        return
    _emit(prefix, message)


def warn(prefix, message):
    _emit(prefix, message, Fore.YELLOW)


def fail(prefix, message):
    _emit(prefix, message, Fore.RED)


def ok(prefix, message):
    if _state["quiet"]:
        return
    _emit(prefix, message, Fore.GREEN)


def progress(iterable=None, desc="", total=None, enabled=True):
    """tqdm on stderr; off when quiet or disabled, and automatically off without a TTY."""
    disable = True if (_state["quiet"] or not enabled) else None
    return tqdm(iterable, desc=f"[{desc}]" if desc else None, total=total, file=sys.stderr,
                disable=disable, leave=False)
