import logbook

LEVELS = {0: logbook.WARNING, 1: logbook.INFO, 2: logbook.DEBUG}


class DecompLogger(logbook.Logger):
    """Named logger for one area of the package, e.g. ``DecompLogger("Energy")``."""

    def __init__(self, name: str):
        super().__init__(f"fq-decomp.{name}")


def stderr_handler(verbosity: int = 0) -> logbook.Handler:
    level = LEVELS.get(min(verbosity, 2), logbook.DEBUG)
    return logbook.StderrHandler(
        level=level,
        format_string="{record.time:%H:%M:%S} [{record.level_name}] {record.channel}: {record.message}",
        bubble=False,
    )
