import hashlib
from dataclasses import dataclass, field
from os import PathLike
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from todjumps.utils.serialization import write_json

PathType = Union[str, "PathLike[str]"]

MANIFEST_NAME = "manifest.json"


def file_digest(path: PathType) -> str:
    """Hex SHA-256 digest of a file's contents."""
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)

    return digest.hexdigest()


@dataclass
class RunManifest:
    """
    Provenance record written next to the outputs of every command.

    It holds no timestamps or absolute output paths, so re-running a command
    with the same inputs, parameters and seed reproduces it byte for byte.

    Parameters
    ----------
    command : str
        Name of the command that produced the outputs.

    parameters : dict of str to any
        Every parameter of the run after defaults were applied.

    tool_version : str
        Version of this package.

    seed : int, optional
        Seed of any randomness used by the run.
    """

    command: str
    parameters: Dict[str, Any]
    tool_version: str
    seed: Optional[int] = None
    input_digests: Dict[str, str] = field(default_factory=dict)
    outputs: List[str] = field(default_factory=list)

    def add_input(self, path: PathType) -> None:
        self.input_digests[str(path)] = file_digest(path)

    def add_outputs(self, paths: List[Path]) -> None:
        self.outputs.extend(Path(p).name for p in paths)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "parameters": self.parameters,
            "tool_version": self.tool_version,
            "seed": self.seed,
            "input_digests": self.input_digests,
            "outputs": sorted(self.outputs),
        }

    def write(self, out_dir: PathType) -> Path:
        return write_json(Path(out_dir) / MANIFEST_NAME, self.to_dict())
