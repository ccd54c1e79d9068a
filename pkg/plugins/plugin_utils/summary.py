import re

from ansible import constants as C
from ansible.utils.color import stringc
from ansible.utils.display import Display

display = Display()

try:
    from ClusterShell.NodeSet import NodeSet

    DO_NODESET = True

except ImportError:
    display.warning("unable to import clustershell. index lists will not be folded.")

    DO_NODESET = False

# https://stackoverflow.com/a/14693789/18696276
ANSI_REGEX = re.compile(r"\x1B(?:[@-Z\\-_]|\[[0-?]*[ -/]*[@-~])")

STATUS_COLORS = {
    "NONCONTEXTUAL": C.COLOR_OK,
    "CONTEXTUAL": C.COLOR_ERROR,
    "INCOMPATIBLE": C.COLOR_WARN,
    "INCONCLUSIVE": C.COLOR_SKIP,
}


def decolorize(x: str) -> str:
    return re.sub(ANSI_REGEX, "", x)


def fold_indices(prefix: str, indices) -> str:
    """
    fold_indices("k", [0, 1, 2, 5]) -> "k[0-2,5]"
    without clustershell: "k0,k1,k2,k5"
    """
    names = [f"{prefix}{i}" for i in sorted(set(indices))]
    if not names:
        return "none"
    if DO_NODESET:
        return str(NodeSet.fromlist(names))
    else:
        return ",".join(names)


def _status(status: str) -> str:
    return stringc(status, STATUS_COLORS.get(status, C.COLOR_VERBOSE))


def _pair(entry: dict) -> str:
    left, right = entry["pair"]
    return f"({','.join(left)}) vs ({','.join(right)}) on ({','.join(entry['intersection']) or '∅'})"


def _summarize_verdict(output: dict) -> list[str]:
    lines = [f"{_status(output['status'])} ({output['mode']})"]
    if output["reason"]:
        lines.append(f"  reason: {output['reason']}")
    witness = output["witness"]
    if witness is not None:
        D = witness["D"]
        if witness["pattern"] is not None:
            lines.append(f"  support pattern: {witness['pattern']}")
        if witness["mu"] is not None:
            lines.append(f"  mu: {witness['mu']}")
        if len(D[0]) == 1:
            weighted = [k for k, row in enumerate(D) if row[0] not in ("0", 0)]
            lines.append(f"  global sections with weight: {fold_indices('k', weighted)}")
        else:
            lines.append(f"  global response matrix: {len(D)}x{len(D[0])}")
    certificate = output["certificate"]
    if certificate is not None:
        if certificate["kind"] == "farkas":
            lines.append(f"  farkas vector over {len(certificate['y'])} rows, y.b = {certificate['y_dot_b']}")
        elif certificate["kind"] == "uncovered_sections":
            for entry in certificate["sections"]:
                lines.append(f"  no global section produces {entry['section']} on {entry['context']}")
        else:
            kinds = {}
            for n, entry in enumerate(certificate["patterns"]):
                kinds.setdefault(entry["kind"], []).append(n)
            for kind, patterns in kinds.items():
                lines.append(f"  {kind}: {fold_indices('pattern', patterns)}")
    for entry in output["incompatibility"]:
        lines.append(stringc(f"  incompatible: {_pair(entry)}", C.COLOR_WARN))
    return lines


def summarize(output: dict) -> str:
    """human readable lines for any JSON document the CLI prints"""
    if "status" in output:
        lines = _summarize_verdict(output)
    elif "pairs" in output:
        ok = stringc("compatible", C.COLOR_OK) if output["compatible"] else stringc("not compatible", C.COLOR_ERROR)
        lines = [f"{output['check']}: {ok}"]
        bad = [n for n, entry in enumerate(output["pairs"]) if not entry["equal"]]
        if bad:
            lines.append(f"  differing pairs: {fold_indices('pair', bad)}")
            lines.extend(f"  {_pair(output['pairs'][n])}" for n in bad)
    elif "valid" in output:
        lines = [f"{stringc('valid', C.COLOR_OK)} {output['kind']} model, {output['contexts']} contexts"]
    elif "forbidden" in output:
        forbidden = output["forbidden"]
        lines = [f"unique forbidden outcome per column: {forbidden['unique_zero']}"]
        by_outcome = {}
        for n, column in enumerate(forbidden["columns"]):
            for o in column["forbidden"]:
                by_outcome.setdefault(o, []).append(n)
        for o, columns in by_outcome.items():
            lines.append(f"  outcome {o} forbidden in columns {fold_indices('j', columns)}")
        for entry in output.get("parity", []):
            lines.append(
                f"  {''.join(entry['assignment'])} parity {entry['parity']}: {len(entry['forbidden'])} forbidden"
            )
    else:
        lines = [str(output)]
    return "\n".join(lines)
