# edibnet/utils/messages.py
import json
import math
from pathlib import Path
from typing import Iterable, Mapping


def _value(value) -> str:
    if isinstance(value, float):
        return "inf" if math.isinf(value) else f"{value:.6f}"
    return str(value)


def key_value_text(values: Mapping, prefix: str = "") -> str:
    return "".join(f"{prefix}{key}={_value(value)}\n" for key, value in values.items())


def rows_text(rows: Iterable[Mapping], key: str, prefix: str = "") -> str:
    """One block of ``<prefix><row[key]>.<field>=value`` lines per row."""
    text = ""
    for row in rows:
        fields = {k: v for k, v in row.items() if k != key}
        text += key_value_text(fields, prefix=f"{prefix}{row[key]}.")
    return text


def json_sibling(path) -> Path:
    """report.txt -> report.json; a path without suffix gets .json appended."""
    path = Path(path)
    return path.with_suffix(".json") if path.suffix != ".json" else path.with_name(path.name + ".json")


def _json_safe(value):
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def write_report(path, text: str, payload: Mapping) -> Path:
    """Write the key=value text to ``path`` and the structured payload next to it."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    sibling = json_sibling(path)
    sibling.write_text(json.dumps(_json_safe(dict(payload)), indent=2))
    return sibling


def epoch_message(epoch: int, psnr_pred: float, psnr_blurred: float) -> str:
    return f"epoch {epoch}: validation PSNR {psnr_pred:.3f} dB (blurred {psnr_blurred:.3f} dB)"


def missing_weights_message() -> str:
    return "No --weights given; using freshly initialized parameters (identity network)"
