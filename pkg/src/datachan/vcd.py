"""Value Change Dump export of simulation traces (1 ps timescale)."""

from __future__ import annotations

from pathlib import Path

from .logic import SignalTraces

_ID_CHARS = [chr(c) for c in range(33, 127)]


def _identifiers(n: int) -> list[str]:
    ids = []
    for i in range(n):
        s = ""
        k = i
        while True:
            s = _ID_CHARS[k % len(_ID_CHARS)] + s
            k = k // len(_ID_CHARS) - 1
            if k < 0:
                break
        ids.append(s)
    return ids


def traces_to_vcd(traces: SignalTraces, module: str = "channel") -> str:
    """Render traces as VCD text; byte-stable for identical inputs."""
    nets = traces.nets()
    if not nets:
        raise ValueError("no nets to export")
    ids = dict(zip(nets, _identifiers(len(nets))))

    out = [
        "$timescale 1 ps $end",
        f"$scope module {module} $end",
    ]
    for net in nets:
        out.append(f"$var wire 1 {ids[net]} {net} $end")
    out.append("$upscope $end")
    out.append("$enddefinitions $end")

    out.append("#0")
    out.append("$dumpvars")
    changes: dict[int, list[str]] = {}
    for net in nets:
        hist = traces.events[net]
        first = hist[0] if hist else None
        if first is not None and first[0] == 0:
            out.append(f"{first[1].vcd_char}{ids[net]}")
            rest = hist[1:]
        else:
            out.append(f"x{ids[net]}")
            rest = hist
        for t, lvl in rest:
            changes.setdefault(t, []).append(f"{lvl.vcd_char}{ids[net]}")
    out.append("$end")

    for t in sorted(changes):
        out.append(f"#{t}")
        out.extend(changes[t])
    out.append(f"#{traces.horizon_ps}")
    return "\n".join(out) + "\n"


def export_vcd(traces: SignalTraces, path: str | Path) -> None:
    Path(path).write_text(traces_to_vcd(traces))
