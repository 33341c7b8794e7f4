"""
Staged command outputs: nothing touches the filesystem until every file has
been rendered, and each file lands through a temp file plus rename.
"""
from __future__ import annotations

import logging
import os
import tempfile
from pathlib import Path
from typing import Dict, List, Union

from ..utils.exceptions import OutputWriteError

cli_log = logging.getLogger('cli')


class OutputPlan:
    def __init__(self):
        self.files: Dict[Path, bytes] = {}

    def __len__(self) -> int:
        return len(self.files)

    def add(self, path: Union[str, Path], data: Union[str, bytes]):
        path = Path(path)
        if path in self.files:
            raise OutputWriteError(str(path), "written twice by one command")
        self.files[path] = data.encode("utf-8") if isinstance(data, str) else data

    def commit(self):
        staged: List[tuple] = []
        try:
            for path, data in self.files.items():
                path.parent.mkdir(parents=True, exist_ok=True)
                fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
                staged.append((tmp, path))
                with os.fdopen(fd, "wb") as f:
                    f.write(data)
            for tmp, path in staged:
                os.replace(tmp, path)
        except OSError as e:
            for tmp, _ in staged:
                if os.path.exists(tmp):
                    os.unlink(tmp)
            raise OutputWriteError(str(e.filename or "output"), e.strerror or str(e)) from e
        cli_log.info("wrote %d file(s)", len(staged))
