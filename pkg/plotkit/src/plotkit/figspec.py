"""Figure specifications: what CSV to read, what to draw, where to write."""

from dataclasses import dataclass, field

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

KINDS = ("snr_sweep", "antenna_sweep", "logn_sweep")

# Default styling per solver; entries are (label, color, linestyle, marker).
DEFAULT_STYLES = {
    "gradient": ("gradient ascent", "tab:blue", "-", "o"),
    "global2x2": ("global search", "tab:red", "--", "s"),
    "tzf": ("TZF", "tab:green", "-", "^"),
    "rzf": ("RZF", "tab:purple", "-", "v"),
    "pbsum": ("penalty-BSUM", "tab:orange", "-", "D"),
    "upper_bound": ("no-SI upper bound", "black", ":", "x"),
    "hd_half": ("half-duplex", "tab:gray", "-.", "+"),
}


class FigureSpecError(ValueError):
    pass


@dataclass(frozen=True)
class FigureSpec:
    csv_path: str
    kind: str
    output: str
    solvers: tuple = ()          # empty means every solver present in the CSV
    styles: dict = field(default_factory=dict)  # solver -> {label, color, linestyle, marker}
    title: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FigureSpecError(f"unknown figure kind {self.kind!r}; use one of {KINDS}")


def load_figure_spec(path: str) -> FigureSpec:
    try:
        with open(path, "rb") as f:
            doc = tomllib.load(f)
    except FileNotFoundError as e:
        raise FigureSpecError(f"spec file not found: {path}") from e
    except tomllib.TOMLDecodeError as e:
        raise FigureSpecError(f"spec file is not valid TOML: {e}") from e
    fig = doc.get("figure", {})
    try:
        return FigureSpec(
            csv_path=str(fig["csv"]),
            kind=str(fig["kind"]),
            output=str(fig["output"]),
            solvers=tuple(fig.get("solvers", ())),
            styles=dict(doc.get("styles", {})),
            title=str(fig.get("title", "")),
        )
    except KeyError as e:
        raise FigureSpecError(f"figure spec missing key: {e}") from e


TEMPLATE = """\
# plotkit figure specification

[figure]
csv = "results.csv"
kind = "snr_sweep"          # snr_sweep | antenna_sweep | logn_sweep
output = "figure.png"       # .png or .svg
solvers = []                # empty: every solver found in the CSV
title = ""

# optional per-solver styling overrides:
# [styles.tzf]
# label = "TZF"
# color = "tab:green"
# linestyle = "-"
# marker = "^"
"""
