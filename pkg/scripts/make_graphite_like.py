"""Regenerate the bundled graphite-like optical tables from their analytic models."""
from pathlib import Path

from casipol.materials import GRAPHITE_ENERGIES, GRAPHITE_X, GRAPHITE_Z, write_optical_table

out = Path(__file__).resolve().parents[1] / "src" / "casipol" / "data"
for axis, model in (("x", GRAPHITE_X), ("z", GRAPHITE_Z)):
    write_optical_table(
        model.to_table(GRAPHITE_ENERGIES, axis=axis),
        out / f"graphite_like_{axis}.csv",
        header=[f"synthetic graphite-like data, axis {axis}", f"model: {model.describe()}"],
    )
