import os


class TerminalColors:
    # Reset
    RESET = "\033[0m"

    # Text colors
    RED = "\033[31m"
    GREEN = "\033[32m"
    YELLOW = "\033[33m"
    BLUE = "\033[34m"
    CYAN = "\033[36m"
    PURPLE = "\033[35m"

    # Background colors
    BG_BRIGHT_RED = "\033[101m"

    # Styles
    BOLD = "\033[1m"

    @classmethod
    def status(cls, passed: bool) -> str:
        """Coloured PASS / FAIL tag for report lines."""
        return f"{cls.GREEN}PASS{cls.RESET}" if passed else f"{cls.RED}FAIL{cls.RESET}"

    @classmethod
    def disable(cls) -> None:
        """Blank every escape code, for NO_COLOR terminals and captured output."""
        for name in ("RESET", "RED", "GREEN", "YELLOW", "BLUE", "CYAN", "PURPLE", "BG_BRIGHT_RED", "BOLD"):
            setattr(cls, name, "")


if os.getenv("NO_COLOR"):
    TerminalColors.disable()
