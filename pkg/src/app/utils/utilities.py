import json
import os
import tempfile
from pathlib import Path
from typing import Any

import numpy as np

from app.utils.logging import logger


class Utilities:

    @staticmethod
    def to_json(payload: Any) -> str:
        """
        Serialize a payload with stable key order and numpy values made plain.

        Args:
            payload: dict/list structure, may contain numpy scalars or arrays

        Returns:
            JSON text ending with a newline
        """
        return json.dumps(Utilities.plain(payload), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    @staticmethod
    def plain(value: Any) -> Any:
        if isinstance(value, dict):
            return {str(k): Utilities.plain(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [Utilities.plain(v) for v in value]
        if isinstance(value, np.ndarray):
            return Utilities.plain(value.tolist())
        if isinstance(value, np.generic):
            return value.item()
        return value

    @staticmethod
    def fmt6(value: float) -> str:
        # no negative zero in output
        text = f"{float(value):.6f}"
        return "0.000000" if text == "-0.000000" else text

    @staticmethod
    def atomic_write_text(path: Path | str, text: str) -> Path:
        """
        Write text to path through a temp file in the same directory and a rename.

        Args:
            path: destination file
            text: full file contents

        Returns:
            The destination path
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
                handle.write(text)
            os.replace(tmp_name, path)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise
        logger.debug({'message': f"wrote {path}", 'bytes': len(text)})
        return path
