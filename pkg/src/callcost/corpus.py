"""Document collections, tokenization and the inverted index.

The index has the three-level shape ``word -> {df, docId -> tf}`` and keeps
first-occurrence insertion order everywhere, so any two traversals of the
same index visit postings in the same sequence.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import CorpusError, IndexFormatError

INDEX_FORMAT_VERSION = 1
REPLICA_SEPARATOR = "#"

_TOKEN_RE = re.compile(r"[^\W_]+")


def load_default_stopwords() -> frozenset[str]:
    text = resources.files("callcost").joinpath("data/stopwords.txt").read_text("utf-8")
    words = (line.strip() for line in text.splitlines())
    return frozenset(w for w in words if w and not w.startswith("#"))


DEFAULT_STOPWORDS = load_default_stopwords()


@dataclass(frozen=True)
class TokenFilterConfig:
    min_len: int = 3
    stopwords: frozenset[str] = DEFAULT_STOPWORDS


@dataclass(frozen=True)
class Document:
    id: str
    tokens: tuple[str, ...]

    @property
    def dl(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class PostingEntry:
    """One word's slot in the index: document frequency and ``docId -> tf``."""

    df: int
    postings: dict[str, int]


@dataclass(frozen=True)
class CorpusStats:
    """Collection-level statistics: ``d`` documents, per-document length, ``avdl``."""

    d: int
    avdl: float
    doc_lengths: dict[str, int] = field(repr=False)

    @classmethod
    def from_lengths(cls, doc_lengths: Mapping[str, int]) -> "CorpusStats":
        lengths = dict(doc_lengths)
        if not lengths:
            raise CorpusError("collection has no documents")
        total = sum(lengths.values())
        if total <= 0:
            raise CorpusError("collection has no indexable tokens")
        return cls(d=len(lengths), avdl=total / len(lengths), doc_lengths=lengths)


class InvertedIndex:
    """Ordered map ``word -> PostingEntry``.

    Treat instances as read-only once built; kernels and the serializer
    rely on the iteration order never changing.
    """

    __slots__ = ("entries",)

    def __init__(self, entries: dict[str, PostingEntry]):
        self.entries = entries

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, word) -> bool:
        return word in self.entries

    def __getitem__(self, word: str) -> PostingEntry:
        return self.entries[word]

    def __iter__(self):
        return iter(self.entries)

    def items(self):
        return self.entries.items()

    def total_postings(self) -> int:
        return sum(len(e.postings) for e in self.entries.values())

    def ordered_items(self) -> list:
        return [(w, e.df, list(e.postings.items())) for w, e in self.entries.items()]

    def __eq__(self, other) -> bool:
        if not isinstance(other, InvertedIndex):
            return NotImplemented
        return self.ordered_items() == other.ordered_items()

    def __repr__(self) -> str:
        return f"InvertedIndex({len(self.entries)} entries, {self.total_postings()} postings)"

    def validate(self) -> None:
        if not self.entries:
            raise CorpusError("inverted index has no entries")
        for word, entry in self.entries.items():
            if entry.df < 1 or not entry.postings:
                raise CorpusError(f"entry {word!r} has no postings")
            if entry.df != len(entry.postings):
                raise CorpusError(
                    f"entry {word!r}: df={entry.df} but {len(entry.postings)} postings"
                )
            for doc_id, tf in entry.postings.items():
                if tf < 1:
                    raise CorpusError(f"entry {word!r}: tf={tf} for {doc_id!r}")


def tokenize(text: str, filter: TokenFilterConfig | None = None) -> list[str]:
    """Lowercase, split on non-alphanumerics, drop short words and stopwords."""
    cfg = filter or TokenFilterConfig()
    stop = cfg.stopwords
    min_len = cfg.min_len
    return [
        tok
        for tok in _TOKEN_RE.findall(text.lower())
        if len(tok) >= min_len and tok not in stop
    ]


def make_documents(pairs: Iterable[tuple[str, str]], filter: TokenFilterConfig | None = None):
    return [Document(doc_id, tuple(tokenize(text, filter))) for doc_id, text in pairs]


def read_text_dir(path, filter: TokenFilterConfig | None = None) -> list[Document]:
    """One document per ``*.txt`` file, id = filename stem, sorted by name."""
    files = sorted(Path(path).glob("*.txt"))
    return make_documents(((f.stem, f.read_text("utf-8")) for f in files), filter)


def read_jsonl(path, filter: TokenFilterConfig | None = None) -> list[Document]:
    """One document per line: ``{"id": ..., "text": ...}``; blank lines skipped."""
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise IndexFormatError(f"{path}: bad JSON: {exc.msg}", lineno, exc.colno) from exc
            if not isinstance(obj, dict) or not isinstance(obj.get("id"), str) \
                    or not isinstance(obj.get("text"), str):
                raise IndexFormatError(f"{path}: expected {{'id': str, 'text': str}}", lineno, 1)
            pairs.append((obj["id"], obj["text"]))
    return make_documents(pairs, filter)


def read_corpus(path, filter: TokenFilterConfig | None = None) -> list[Document]:
    p = Path(path)
    if p.is_dir():
        return read_text_dir(p, filter)
    return read_jsonl(p, filter)


def build_index(docs: Iterable[Document]) -> tuple[InvertedIndex, CorpusStats]:
    docs = list(docs)
    if not docs:
        raise CorpusError("cannot index an empty collection")
    doc_lengths: dict[str, int] = {}
    postings: dict[str, dict[str, int]] = {}
    for doc in docs:
        if doc.id in doc_lengths:
            raise CorpusError(f"duplicate document id {doc.id!r}")
        doc_lengths[doc.id] = doc.dl
        for word, tf in Counter(doc.tokens).items():
            postings.setdefault(word, {})[doc.id] = tf
    stats = CorpusStats.from_lengths(doc_lengths)
    entries = {word: PostingEntry(len(p), p) for word, p in postings.items()}
    return InvertedIndex(entries), stats


def replicate_index(index: InvertedIndex, n: int) -> InvertedIndex:
    """Concatenate ``n`` copies of ``index``.

    Copy ``k >= 2`` renames every word to ``word#k`` so the copies do not
    collapse onto each other. Posting maps are shared, not duplicated.
    """
    if n < 1:
        raise ValueError(f"replication factor must be >= 1, got {n}")
    if n == 1:
        return InvertedIndex(dict(index.entries))
    entries = dict(index.entries)
    for k in range(2, n + 1):
        suffix = f"{REPLICA_SEPARATOR}{k}"
        for word, entry in index.entries.items():
            key = word + suffix
            if key in entries:
                raise ValueError(f"replica key {key!r} collides with an existing entry")
            entries[key] = entry
    return InvertedIndex(entries)


# --- synthetic corpora -------------------------------------------------------

_ONSETS = "bdfgklmnprstvz"
_VOWELS = "aeiou"
_SYLLABLES = [c + v for c in _ONSETS for v in _VOWELS]


def synthetic_vocabulary(size: int, stopwords=DEFAULT_STOPWORDS) -> list[str]:
    """Distinct pronounceable pseudo-words, at least two syllables each."""
    base = len(_SYLLABLES)
    words = []
    i = base  # first two-syllable number
    while len(words) < size:
        parts = []
        j = i
        while j:
            j, r = divmod(j, base)
            parts.append(_SYLLABLES[r])
        word = "".join(reversed(parts))
        if word not in stopwords:
            words.append(word)
        i += 1
    return words


def _split_lengths(rng, num_docs: int, mean_dl: int) -> np.ndarray:
    # Gamma-distributed weights, rescaled so lengths sum to num_docs*mean_dl
    # exactly (largest-remainder rounding) with every length >= 1.
    total_extra = num_docs * (mean_dl - 1)
    raw = rng.gamma(shape=4.0, scale=1.0, size=num_docs)
    share = raw / raw.sum() * total_extra
    base = np.floor(share).astype(np.int64)
    short = total_extra - int(base.sum())
    if short:
        order = np.argsort(-(share - base), kind="stable")
        base[order[:short]] += 1
    return base + 1


def generate_synthetic_corpus(num_docs: int, vocab_size: int, mean_dl: int, seed: int,
                              zipf_exponent: float = 1.0) -> list[Document]:
    """Deterministic Zipf-distributed corpus with ``avdl == mean_dl`` exactly."""
    for name, value in (("num_docs", num_docs), ("vocab_size", vocab_size), ("mean_dl", mean_dl)):
        if int(value) != value or value < 1:
            raise ValueError(f"{name} must be a positive integer, got {value!r}")
    if not zipf_exponent > 0:
        raise ValueError(f"zipf_exponent must be positive, got {zipf_exponent!r}")
    rng = np.random.default_rng(seed)
    vocab = synthetic_vocabulary(vocab_size)
    ranks = np.arange(1, vocab_size + 1, dtype=np.float64)
    probs = ranks ** -zipf_exponent
    probs /= probs.sum()
    lengths = _split_lengths(rng, num_docs, mean_dl)
    draws = rng.choice(vocab_size, size=int(lengths.sum()), p=probs)
    docs = []
    start = 0
    width = len(str(num_docs))
    for i, n in enumerate(lengths.tolist()):
        ids = draws[start:start + n].tolist()
        start += n
        docs.append(Document(f"doc_{i + 1:0{width}d}", tuple(vocab[t] for t in ids)))
    return docs


# --- index file --------------------------------------------------------------

def index_to_json(index: InvertedIndex, stats: CorpusStats) -> str:
    payload = {
        "version": INDEX_FORMAT_VERSION,
        "d": stats.d,
        "avdl": stats.avdl,
        "doc_lengths": stats.doc_lengths,
        "entries": [
            [word, entry.df, [[doc_id, tf] for doc_id, tf in entry.postings.items()]]
            for word, entry in index.entries.items()
        ],
    }
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":"))


def save_index(index: InvertedIndex, stats: CorpusStats, path) -> None:
    Path(path).write_text(index_to_json(index, stats) + "\n", encoding="utf-8")


def _fail(msg):
    raise IndexFormatError(msg)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def index_from_json(text: str) -> tuple[InvertedIndex, CorpusStats]:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IndexFormatError(f"malformed index file: {exc.msg}", exc.lineno, exc.colno) from exc
    if not isinstance(obj, dict):
        _fail("index file must hold a JSON object")
    version = obj.get("version")
    if version != INDEX_FORMAT_VERSION:
        _fail(f"unsupported index format version {version!r} (expected {INDEX_FORMAT_VERSION})")
    for key in ("d", "avdl", "doc_lengths", "entries"):
        if key not in obj:
            _fail(f"missing key {key!r}")

    lengths = obj["doc_lengths"]
    if not isinstance(lengths, dict) or not lengths:
        _fail("doc_lengths must be a non-empty object")
    for doc_id, dl in lengths.items():
        if not _is_int(dl) or dl < 0:
            _fail(f"doc_lengths[{doc_id!r}] must be a non-negative integer")
    d, avdl = obj["d"], obj["avdl"]
    if not _is_int(d) or d != len(lengths):
        _fail(f"d={d!r} does not match {len(lengths)} doc_lengths")
    if not isinstance(avdl, (int, float)) or avdl <= 0:
        _fail(f"avdl must be positive, got {avdl!r}")
    expected = sum(lengths.values()) / d
    if not math.isclose(avdl, expected, rel_tol=1e-12):
        _fail(f"avdl={avdl!r} inconsistent with doc_lengths (expected {expected!r})")

    raw_entries = obj["entries"]
    if not isinstance(raw_entries, list) or not raw_entries:
        _fail("entries must be a non-empty array")
    entries: dict[str, PostingEntry] = {}
    for pos, item in enumerate(raw_entries):
        if not (isinstance(item, list) and len(item) == 3 and isinstance(item[0], str)
                and _is_int(item[1]) and isinstance(item[2], list)):
            _fail(f"entries[{pos}] must be [word, df, [[docId, tf], ...]]")
        word, df, plist = item
        if word in entries:
            _fail(f"entries[{pos}]: duplicate word {word!r}")
        postings: dict[str, int] = {}
        for p in plist:
            if not (isinstance(p, list) and len(p) == 2 and isinstance(p[0], str) and _is_int(p[1])):
                _fail(f"entries[{pos}] ({word!r}): posting must be [docId, tf]")
            doc_id, tf = p
            if tf < 1:
                _fail(f"entries[{pos}] ({word!r}): tf must be >= 1, got {tf}")
            if doc_id in postings:
                _fail(f"entries[{pos}] ({word!r}): duplicate posting {doc_id!r}")
            if doc_id not in lengths:
                _fail(f"entries[{pos}] ({word!r}): unknown document {doc_id!r}")
            postings[doc_id] = tf
        if df < 1 or df != len(postings):
            _fail(f"invariant violation in entries[{pos}] ({word!r}): "
                  f"df={df} but {len(postings)} postings")
        entries[word] = PostingEntry(df, postings)
    return InvertedIndex(entries), CorpusStats(d=d, avdl=float(avdl), doc_lengths=dict(lengths))


def load_index(path) -> tuple[InvertedIndex, CorpusStats]:
    return index_from_json(Path(path).read_text(encoding="utf-8"))
