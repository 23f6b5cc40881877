"""Monte Carlo sweeps over (channel, Eb/N0) grids with CSV output.

Determinism contract: the CSV produced by a sweep depends only on the
configuration, never on the worker count or scheduling.  Each trial derives
its own seed from (global seed, channel index, Eb/N0 in milli-dB, trial
index) through ``channel.derive_seed``, and per-trial results are reduced
in trial order after the pool returns them.

Trial t of a cell transmits ``sentences[t mod len(sentences)]``, so a
100-sentence corpus with 1000 trials per point sends every sentence ten
times under independent noise.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass, replace
from importlib import resources

from .channel import CHANNEL_KINDS, ChannelConfig, derive_seed
from .core import ParameterError
from .metrics import HashEmbeddingProvider
from .pipeline import (
    DecoderConfig,
    ReferenceByteCodec,
    default_code,
    external_codec_client,
    transmit,
)

CSV_COLUMNS = ("channel", "ebno_db", "trials", "ber", "bler", "bleu1", "bleu2",
               "bleu3", "bleu4", "bleu_composite", "sem_sim", "seed")

DEFAULT_GRID = tuple(float(db) for db in range(0, 15))


@dataclass(frozen=True)
class SweepConfig:
    """Full description of one sweep run."""

    ebno_grid_db: tuple[float, ...] = DEFAULT_GRID
    channels: tuple[str, ...] = ("awgn", "rayleigh")
    codec: str = "reference"
    trials_per_point: int = 100
    sentences_file: str | None = None
    seed: int = 1
    sanitize: str = "clamp"
    decoder: str = "sc"
    fmt: str = "fp32"
    semantic: bool = False
    bleu_max_n: int = 4
    workers: int = 1
    out: str | None = None

    def __post_init__(self):
        if not self.ebno_grid_db:
            raise ParameterError("Eb/N0 grid must not be empty")
        if not self.channels:
            raise ParameterError("at least one channel kind is required")
        for kind in self.channels:
            if kind not in CHANNEL_KINDS:
                raise ParameterError(f"unknown channel kind {kind!r}")
        if self.trials_per_point < 1:
            raise ParameterError("trials_per_point must be >= 1")
        if self.seed < 0:
            raise ParameterError("seed must be non-negative")
        if self.workers < 1:
            raise ParameterError("workers must be >= 1")
        parse_decoder(self.decoder)
        parse_codec(self.codec)


def parse_decoder(text: str) -> tuple[DecoderConfig, int]:
    """Parse "sc", "scl:L", or "scl:L:crc11|crc24" into config + CRC width."""
    parts = text.strip().lower().split(":")
    if parts[0] == "sc" and len(parts) == 1:
        return DecoderConfig("sc"), 0
    if parts[0] == "scl" and 2 <= len(parts) <= 3:
        try:
            list_size = int(parts[1])
        except ValueError:
            raise ParameterError(f"bad list size in decoder spec {text!r}") from None
        crc_width = 0
        if len(parts) == 3:
            if parts[2] not in ("crc11", "crc24"):
                raise ParameterError(f"bad CRC in decoder spec {text!r}")
            crc_width = int(parts[2][3:])
        return DecoderConfig("scl", list_size), crc_width
    raise ParameterError(f"bad decoder spec {text!r}, expected sc or scl:L[:crc11|crc24]")


def parse_codec(text: str) -> tuple[str, str | None]:
    """Parse "reference" or "external[:host:port]" into (kind, endpoint)."""
    if text == "reference":
        return "reference", None
    if text == "external":
        return "external", None
    if text.startswith("external:"):
        return "external", text[len("external:"):]
    raise ParameterError(f"unknown codec spec {text!r}")


def load_sentences(path: str | None) -> list[str]:
    """Non-empty lines of the corpus file (packaged corpus when no path)."""
    if path is None:
        text = resources.files("semlink").joinpath("data/sentences.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    sentences = [line.strip() for line in text.splitlines() if line.strip()]
    if not sentences:
        raise ParameterError(f"no usable sentences in {path or 'the packaged corpus'}")
    return sentences


# Worker-process state, built once per process by _init_worker.
_WORKER: dict = {}


def _init_worker(config: SweepConfig, sentences: list[str]) -> None:
    codec_kind, endpoint = parse_codec(config.codec)
    if codec_kind == "reference":
        codec = ReferenceByteCodec()
        provider = HashEmbeddingProvider() if config.semantic else None
    else:
        client = external_codec_client(endpoint)
        codec = client
        provider = client if config.semantic else None
    decoder, crc_width = parse_decoder(config.decoder)
    _WORKER.update(
        config=config, sentences=sentences, codec=codec, provider=provider,
        decoder=decoder, code=default_code(crc_width))


def _run_trial(task: tuple[int, int, int]) -> tuple:
    channel_idx, ebno_milli_db, trial_idx = task
    config: SweepConfig = _WORKER["config"]
    sentences = _WORKER["sentences"]
    code = _WORKER["code"]
    sentence = sentences[trial_idx % len(sentences)]
    seed = derive_seed(config.seed, channel_idx, ebno_milli_db, trial_idx)
    channel_cfg = ChannelConfig(
        kind=config.channels[channel_idx],
        ebno_db=ebno_milli_db / 1000.0,
        code_rate=code.code_rate,
        bits_per_symbol=4,
        seed=seed)
    report = transmit(
        sentence, _WORKER["codec"], code, channel_cfg,
        decoder=_WORKER["decoder"], sanitize=config.sanitize, fmt=config.fmt,
        provider=_WORKER["provider"], bleu_max_n=config.bleu_max_n)
    per_n = report.scores.bleu_per_n
    return (
        report.bits_errored, report.bits_total,
        report.blocks_errored, report.blocks_total,
        per_n.get(1, 0.0), per_n.get(2, 0.0), per_n.get(3, 0.0), per_n.get(4, 0.0),
        report.scores.bleu_composite,
        report.scores.semantic_similarity,
    )


def run_sweep(config: SweepConfig) -> list[dict]:
    """Execute the sweep and return one aggregate row dict per grid cell."""
    sentences = load_sentences(config.sentences_file)
    tasks = []
    for channel_idx in range(len(config.channels)):
        for ebno in config.ebno_grid_db:
            milli = round(ebno * 1000)
            for trial in range(config.trials_per_point):
                tasks.append((channel_idx, milli, trial))

    if config.workers == 1:
        _init_worker(config, sentences)
        results = [_run_trial(task) for task in tasks]
    else:
        with multiprocessing.Pool(
                config.workers, initializer=_init_worker,
                initargs=(config, sentences)) as pool:
            results = pool.map(_run_trial, tasks, chunksize=16)

    rows = []
    per_cell = config.trials_per_point
    cell = 0
    for channel_idx in range(len(config.channels)):
        for ebno in config.ebno_grid_db:
            chunk = results[cell * per_cell:(cell + 1) * per_cell]
            cell += 1
            rows.append(_aggregate(config, config.channels[channel_idx], ebno, chunk))
    return rows


def _aggregate(config: SweepConfig, channel: str, ebno: float, chunk: list[tuple]) -> dict:
    bits_err = sum(r[0] for r in chunk)
    bits_tot = sum(r[1] for r in chunk)
    blocks_err = sum(r[2] for r in chunk)
    blocks_tot = sum(r[3] for r in chunk)
    n = len(chunk)
    sems = [r[9] for r in chunk if r[9] is not None]
    return {
        "channel": channel,
        "ebno_db": float(ebno),
        "trials": n,
        "ber": bits_err / bits_tot if bits_tot else 0.0,
        "bler": blocks_err / blocks_tot if blocks_tot else 0.0,
        "bleu1": sum(r[4] for r in chunk) / n,
        "bleu2": sum(r[5] for r in chunk) / n,
        "bleu3": sum(r[6] for r in chunk) / n,
        "bleu4": sum(r[7] for r in chunk) / n,
        "bleu_composite": sum(r[8] for r in chunk) / n,
        "sem_sim": sum(sems) / len(sems) if sems else None,
        "seed": config.seed,
    }


def format_csv(rows: list[dict]) -> str:
    """Render aggregate rows as CSV text, bytes-stable for equal inputs."""
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        cells = []
        for col in CSV_COLUMNS:
            value = row[col]
            if value is None:
                cells.append("")
            elif isinstance(value, float):
                cells.append(repr(value))
            else:
                cells.append(str(value))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def write_csv(rows: list[dict], path: str) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(format_csv(rows))


def single_report(config: SweepConfig, sentence: str | None, channel: str,
                  ebno_db: float):
    """Transmit one sentence (first corpus line when None) and return the report."""
    sentences = load_sentences(config.sentences_file)
    text = sentence if sentence is not None else sentences[0]
    cfg_one = replace(config, channels=(channel,), ebno_grid_db=(ebno_db,))
    _init_worker(cfg_one, [text])
    decoder, crc_width = parse_decoder(config.decoder)
    seed = derive_seed(config.seed, 0, round(ebno_db * 1000), 0)
    channel_cfg = ChannelConfig(
        kind=channel, ebno_db=ebno_db, code_rate=_WORKER["code"].code_rate,
        bits_per_symbol=4, seed=seed)
    return transmit(
        text, _WORKER["codec"], _WORKER["code"], channel_cfg,
        decoder=decoder, sanitize=config.sanitize, fmt=config.fmt,
        provider=_WORKER["provider"], bleu_max_n=config.bleu_max_n)
