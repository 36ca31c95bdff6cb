"""Codec adapters: declarative descriptions of external encoders plus the
built-in mock model.

External codecs are driven through command templates with named parameter
slots; the toolkit never links codec code. Each invocation runs in its own
working directory and declares where to find the bitstream, the decoded
cloud and (optionally) the geometry substream size.
"""

from __future__ import annotations

import shlex
import shutil
import string
import subprocess
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .cloud import PointCloud
from .errors import ConfigurationError, DomainError, EnvironmentFailure
from . import mock
from .ply import load_ply, save_ply

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

CODEC_IDS = ("GPCC", "VPCC", "JPEGPleno", "Mock")

# Tunable-parameter domains per codec, as (kind, payload).
DEFAULT_PARAM_SCHEMAS: dict[str, dict[str, tuple]] = {
    "GPCC": {
        "pqs": ("real_range", (0.0, 1.0, "exclusive_low")),
        "qp": ("int_range", (4, 51)),
    },
    "VPCC": {
        "aqp": ("int_range", (1, 51)),
        "gqp": ("int_range", (1, 51)),
        "occupancyPrecision": ("choice", (2, 4)),
    },
    "JPEGPleno": {
        "lambda": ("choice", (0.0025, 0.005, 0.01, 0.025, 0.05)),
        "sf": ("choice", (1, 2, 4, 8)),
        "cri": ("choice", (0, 1, 2, 3, 4)),
    },
    "Mock": {
        "s": ("real_range", (0.0, 1.0, "exclusive_low")),
        "q": ("int_range", (4, 51)),
    },
}


@dataclass(frozen=True)
class EncodeOutcome:
    """Raw result of one encode+decode run, before metric computation."""

    params: dict
    bitstream_bytes: float
    geometry_bytes: float | None
    decoded: PointCloud

    def __post_init__(self):
        if self.geometry_bytes is not None and self.geometry_bytes > self.bitstream_bytes:
            raise ConfigurationError("geometry substream exceeds total bitstream size")

    def bpp(self, reference: PointCloud) -> float:
        return 8.0 * self.bitstream_bytes / len(reference)


@dataclass
class CodecAdapter:
    codec_id: str
    command: str | None = None
    decode_command: str | None = None
    params: dict[str, tuple] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.codec_id not in CODEC_IDS:
            raise ConfigurationError(f"unknown codec id {self.codec_id!r}")
        if not self.params:
            self.params = dict(DEFAULT_PARAM_SCHEMAS[self.codec_id])
        if self.codec_id != "Mock":
            if not self.command:
                raise ConfigurationError(f"{self.codec_id} adapter needs a command template")
            if "bitstream" not in self.outputs or "decoded" not in self.outputs:
                raise ConfigurationError(
                    "adapter must declare outputs.bitstream and outputs.decoded"
                )
            self._check_slots()

    def _check_slots(self):
        reserved = {"input", "bitstream", "decoded", "workdir"}
        for template in filter(None, (self.command, self.decode_command)):
            for _, slot, _, _ in string.Formatter().parse(template):
                if slot and slot not in reserved and slot not in self.params:
                    raise ConfigurationError(
                        f"template slot {slot!r} is not in the parameter schema"
                    )

    def check_param(self, name: str, value) -> None:
        if name not in self.params:
            raise DomainError(f"unknown parameter {name!r} for {self.codec_id}")
        kind, payload = self.params[name]
        if kind == "int_range":
            lo, hi = payload
            if not (float(value).is_integer() and lo <= value <= hi):
                raise DomainError(f"{name}={value!r} outside integer range [{lo}, {hi}]")
        elif kind == "real_range":
            lo, hi = payload[0], payload[1]
            ok = lo < value <= hi if "exclusive_low" in payload[2:] else lo <= value <= hi
            if not ok:
                raise DomainError(f"{name}={value!r} outside range ({lo}, {hi}]")
        elif kind == "choice":
            if value not in payload:
                raise DomainError(f"{name}={value!r} not one of {payload}")

    def check_invocable(self) -> None:
        """Fail fast, before any cell runs, when the binary is missing."""
        if self.codec_id == "Mock":
            return
        binary = shlex.split(self.command)[0]
        if shutil.which(binary) is None and not Path(binary).exists():
            raise EnvironmentFailure(f"codec binary {binary!r} not found")

    def encode(self, content: PointCloud, params: dict, workdir: str | Path) -> EncodeOutcome:
        for name, value in params.items():
            self.check_param(name, value)
        if self.codec_id == "Mock":
            return self._encode_mock(content, params)
        return self._encode_external(content, params, Path(workdir))

    def _encode_mock(self, content: PointCloud, params: dict) -> EncodeOutcome:
        s, q = params["s"], params["q"]
        _, geometry_bytes, total_bytes = mock.mock_rate(len(content), s, int(q))
        return EncodeOutcome(
            params=dict(params),
            bitstream_bytes=total_bytes,
            geometry_bytes=geometry_bytes,
            decoded=mock.mock_decode(content, s, int(q)),
        )

    def _encode_external(self, content: PointCloud, params: dict, workdir: Path) -> EncodeOutcome:
        self.check_invocable()
        workdir.mkdir(parents=True, exist_ok=True)
        input_path = workdir / "input.ply"
        save_ply(content, input_path)
        slots = {
            "input": str(input_path),
            "workdir": str(workdir),
            "bitstream": str(workdir / self.outputs["bitstream"]),
            "decoded": str(workdir / self.outputs["decoded"]),
            **params,
        }
        self._run(self.command, slots, workdir)
        if self.decode_command:
            self._run(self.decode_command, slots, workdir)
        bitstream = Path(slots["bitstream"])
        if not bitstream.exists():
            raise EnvironmentFailure(f"encoder produced no bitstream at {bitstream}")
        decoded_path = Path(slots["decoded"])
        if not decoded_path.exists():
            raise EnvironmentFailure(f"no decoded cloud at {decoded_path}")
        geometry_bytes = None
        if "geometry_bytes" in self.outputs:
            gb_path = workdir / self.outputs["geometry_bytes"]
            if gb_path.exists():
                geometry_bytes = float(gb_path.read_text().strip())
        return EncodeOutcome(
            params=dict(params),
            bitstream_bytes=float(bitstream.stat().st_size),
            geometry_bytes=geometry_bytes,
            decoded=load_ply(decoded_path, bit_depth=content.bit_depth),
        )

    @staticmethod
    def _run(template: str, slots: dict, workdir: Path) -> None:
        argv = [part.format(**slots) for part in shlex.split(template)]
        proc = subprocess.run(argv, cwd=workdir, capture_output=True, text=True)
        if proc.returncode != 0:
            raise EnvironmentFailure(
                f"command {argv[0]!r} failed with code {proc.returncode}: "
                f"{proc.stderr.strip()[:500]}"
            )


def mock_adapter() -> CodecAdapter:
    return CodecAdapter(codec_id="Mock")


def load_adapter(path: str | Path) -> CodecAdapter:
    """Read an adapter definition from a TOML config file."""
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    codec_id = data.get("codec_id")
    if codec_id is None:
        raise ConfigurationError(f"adapter config {path} lacks codec_id")
    params = {}
    for name, spec in data.get("params", {}).items():
        if isinstance(spec, dict) and "choice" in spec:
            params[name] = ("choice", tuple(spec["choice"]))
        elif isinstance(spec, dict) and "int_range" in spec:
            params[name] = ("int_range", tuple(spec["int_range"]))
        elif isinstance(spec, dict) and "real_range" in spec:
            payload = tuple(spec["real_range"])
            params[name] = ("real_range", payload)
        else:
            raise ConfigurationError(f"parameter {name!r} has no recognizable domain")
    return CodecAdapter(
        codec_id=codec_id,
        command=data.get("command"),
        decode_command=data.get("decode_command"),
        params=params,
        outputs=dict(data.get("outputs", {})),
    )
