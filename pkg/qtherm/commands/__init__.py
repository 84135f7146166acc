"""
CLI commands. Each class declares NAME, DESCRIPTION, FUNCTION and ARGUMENTS;
qtherm.cli builds one argparse subcommand per class from those attributes.
"""
from concurrent.futures import ThreadPoolExecutor

from ..py.console import progress
from ..py.settings import get_setting, thread_count


def map_grid(evaluate, points, desc):
    """Evaluate every grid point on a thread pool; results come back in grid order."""
    points = list(points)
    workers = max(1, min(thread_count(), len(points)))
    if workers == 1:
        return [evaluate(point) for point in progress(points, desc=desc, enabled=get_setting("show_progress"))]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        results = executor.map(evaluate, points)
        return list(progress(results, desc=desc, total=len(points), enabled=get_setting("show_progress")))
