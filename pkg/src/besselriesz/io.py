"""CSV export for curves and kernel profiles.

Layout: one header row, data rows in ``%.15e``, then footer rows whose first
cell starts with ``#`` (fits and configuration). Files are written to a
temporary sibling and moved into place, so a failed write leaves nothing behind.
"""

from __future__ import annotations

import csv
import io as _io
import os
import tempfile

import numpy as np

from .approx import CurveResult
from .kernels import KernelProfile

FLOAT_FORMAT = "%.15e"


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return str(value)


def table_of(result):
    """``(header, rows, footer)`` for a :class:`CurveResult` or :class:`KernelProfile`."""
    if isinstance(result, CurveResult):
        names = list(result.series)
        header = ["mu", *names]
        cols = [result.mu, *(result.series[n] for n in names)]
        rows = np.column_stack(cols)
        footer = []
        for name, fit in result.fits.items():
            if fit is None:
                footer.append([f"#fit:{name}", "undefined"])
            else:
                slope, intercept, resid = fit
                footer.append([f"#fit:{name}", "slope", _fmt(slope), "intercept", _fmt(intercept), "residual", _fmt(resid)])
        return header, rows, footer
    if isinstance(result, KernelProfile):
        return ["r", "value", "bin_spread"], result.to_rows(), []
    raise TypeError(f"cannot tabulate {type(result).__name__}")


def render_csv(result, config: dict | None = None) -> str:
    header, rows, footer = table_of(result)
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(float(v)) for v in row])
    writer.writerows(footer)
    for key in sorted(config or {}):
        writer.writerow([f"#config:{key}", _fmt(config[key])])
    return buf.getvalue()


def write_csv(result, path, config: dict | None = None) -> None:
    """Write ``result`` to ``path`` atomically (UTF-8)."""
    text = render_csv(result, config)
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".besselriesz-", suffix=".csv", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
