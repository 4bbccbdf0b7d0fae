import os
from pathlib import Path

from utils.terminal_colors import TerminalColors as tc

CONVENTIONS_HEADER = (
    "# sign conventions fixed by verify-contraction",
    "# the printed gamma gives W_eff = -W; two values record this instead of a single flag:",
    "#   gamma_flip  sign taking the printed gamma to the one with W_eff = W",
    "#   hkr_sign    sign turning the raw HKR image into the potential, for that normalised gamma",
    "# jobs run with --printed-gamma multiply hkr_sign by gamma_flip when reading and writing",
)


class Utilities:
    # property to get the path of the vendored data files
    @property
    def data_files_path(self) -> Path:
        """Get the path to the data directory shipped with the workbench."""
        return Path(__file__).parent.parent.resolve() / "data"

    def data_file(self, name: str) -> Path:
        return self.data_files_path / name

    def conventions_path(self) -> Path:
        """The conventions file, overridable through AINFTY_CONVENTIONS_FILE."""
        override = os.getenv("AINFTY_CONVENTIONS_FILE")
        return Path(override) if override else self.data_file("conventions.txt")

    def load_text(self, name_or_path: str | Path) -> str:
        """Load a text file, relative names resolving against the data directory."""
        file_path = Path(name_or_path)
        if not file_path.is_absolute() and not file_path.exists():
            file_path = self.data_file(str(name_or_path))
        try:
            with file_path.open("r", encoding="utf-8") as file:
                return file.read()
        except FileNotFoundError:
            self.log_msg_purple(f"Error: data file not found at {file_path}")
            raise
        except Exception as e:
            self.log_msg_purple(f"Error reading data file: {e}")
            raise

    def read_conventions(self, path: Path | None = None) -> dict[str, int]:
        """``key = ±1`` lines of the conventions file; blank lines and ``#`` comments are skipped."""
        values: dict[str, int] = {}
        for raw in self.load_text(path or self.conventions_path()).splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, value = line.partition("=")
            values[key.strip()] = int(value.strip())
        return values

    def write_conventions(self, values: dict[str, int], path: Path | None = None) -> Path:
        target = path or self.conventions_path()
        lines = list(CONVENTIONS_HEADER)
        lines.extend(f"{key} = {value:+d}" for key, value in sorted(values.items()))
        target.write_text("\n".join(lines) + "\n", encoding="utf-8")
        self.log_msg_green(f"Conventions written to {target}")
        return target

    def log_msg_green(self, msg: str) -> None:
        """Print a message in green."""
        print(f"{tc.GREEN}{msg}{tc.RESET}")

    def log_msg_purple(self, msg: str) -> None:
        """Print a message in purple."""
        print(f"{tc.PURPLE}{msg}{tc.RESET}")

    def log_msg_red(self, msg: str) -> None:
        """Print a failure in red."""
        print(f"{tc.BG_BRIGHT_RED}{msg}{tc.RESET}")
