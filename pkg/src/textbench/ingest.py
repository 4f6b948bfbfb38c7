"""Corpus ingestion: parse heterogeneous source formats into RawDocuments."""

import html
import html.parser
import io
import json
import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Union

logger = logging.getLogger(__name__)

FIELD_NAME_RE = re.compile(r"^[a-z][a-z0-9_]*$")

# Derived-field names are produced by annotators and may not appear in raw input.
RESERVED_DERIVED = {"person", "location", "organization", "noun_phrase"}


def is_reserved_field(name: str) -> bool:
    return (
        name in RESERVED_DERIVED
        or name.endswith("_bigram")
        or name.endswith("_trigram")
    )


class SourceFormat(str, Enum):
    TXT_DIR = "txt_dir"
    HTML_DIR = "html_dir"
    JSONL = "jsonl"
    TWITTER_JSONL = "twitter_jsonl"
    TREC_TEXT = "trec_text"
    REUTERS_SGML = "reuters_sgml"


class IngestError(Exception):
    pass


@dataclass
class RawDocument:
    external_id: str
    labels: list = field(default_factory=list)
    fields: dict = field(default_factory=dict)
    source_format: SourceFormat = SourceFormat.JSONL

    def __post_init__(self):
        if not self.external_id:
            raise IngestError("document has empty external_id")
        for name in self.fields:
            if not FIELD_NAME_RE.match(name):
                raise IngestError(
                    f"doc {self.external_id!r}: bad field name {name!r}"
                )
            if is_reserved_field(name):
                raise IngestError(
                    f"doc {self.external_id!r}: field {name!r} is reserved for annotators"
                )


class _HTMLTextExtractor(html.parser.HTMLParser):
    """Best-effort text extraction; drops script/style, blocks become whitespace."""

    BLOCK_TAGS = {
        "p", "div", "br", "li", "ul", "ol", "tr", "td", "th", "table",
        "h1", "h2", "h3", "h4", "h5", "h6", "blockquote", "pre", "section",
        "article", "header", "footer", "hr", "title",
    }

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.parts = []
        self._skip_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in ("script", "style"):
            self._skip_depth += 1
        elif tag in self.BLOCK_TAGS:
            self.parts.append("\n")

    def handle_endtag(self, tag):
        if tag in ("script", "style"):
            self._skip_depth = max(0, self._skip_depth - 1)
        elif tag in self.BLOCK_TAGS:
            self.parts.append("\n")

    def handle_data(self, data):
        if not self._skip_depth:
            self.parts.append(data)

    def text(self) -> str:
        return "".join(self.parts).strip()


def strip_html(text: str) -> str:
    parser = _HTMLTextExtractor()
    try:
        parser.feed(text)
        parser.close()
    except Exception:  # malformed markup: keep whatever was extracted
        pass
    return parser.text()


def _normalize_source(source) -> Union[Path, io.IOBase]:
    if isinstance(source, (str, Path)):
        return Path(source)
    return source


def _iter_lines(source) -> Iterator[str]:
    if isinstance(source, Path):
        with open(source, "r", encoding="utf-8", errors="replace") as fh:
            yield from fh
    elif isinstance(source, bytes):
        yield from io.StringIO(source.decode("utf-8", errors="replace"))
    else:
        for line in source:
            if isinstance(line, bytes):
                line = line.decode("utf-8", errors="replace")
            yield line


def _read_text(source) -> str:
    if isinstance(source, Path):
        return source.read_text(encoding="utf-8", errors="replace")
    if isinstance(source, bytes):
        return source.decode("utf-8", errors="replace")
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8", errors="replace")
    return data


def parse_stream(format: SourceFormat, source, strict: bool = False) -> Iterator[RawDocument]:
    """Parse ``source`` (path, bytes, or file object) as ``format``.

    Formats are caller-declared, never sniffed. In lenient mode (default)
    malformed records are skipped with a warning; strict mode aborts.
    Duplicate external_ids are an error in either mode.
    """
    format = SourceFormat(format)
    if isinstance(source, (str, Path)):
        source = Path(source)

    parser = _PARSERS[format]
    seen = set()
    for doc in parser(source, strict):
        if doc.external_id in seen:
            raise IngestError(f"duplicate external_id {doc.external_id!r}")
        seen.add(doc.external_id)
        doc.source_format = format
        yield doc


def _handle_bad(strict: bool, msg: str):
    if strict:
        raise IngestError(msg)
    logger.warning("skipping record: %s", msg)


def _parse_jsonl(source, strict) -> Iterator[RawDocument]:
    for lineno, line in enumerate(_iter_lines(_normalize_source(source)), 1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            if not isinstance(obj, dict):
                raise ValueError("record is not an object")
            ext_id = str(obj["id"])
            labels = [str(x) for x in obj.get("labels", [])]
            fields = {
                k: v for k, v in obj.items()
                if k not in ("id", "labels") and isinstance(v, str)
            }
            yield RawDocument(external_id=ext_id, labels=labels, fields=fields)
        except (ValueError, KeyError, IngestError) as e:
            _handle_bad(strict, f"jsonl line {lineno}: {e}")


def _parse_twitter_jsonl(source, strict) -> Iterator[RawDocument]:
    for lineno, line in enumerate(_iter_lines(_normalize_source(source)), 1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            ext_id = str(obj["id_str"])
            fields = {"body": str(obj.get("text", ""))}
            user = obj.get("user") or {}
            if user.get("screen_name"):
                fields["author"] = str(user["screen_name"])
            yield RawDocument(external_id=ext_id, fields=fields)
        except (ValueError, KeyError, IngestError) as e:
            _handle_bad(strict, f"twitter jsonl line {lineno}: {e}")


_TREC_DOC_RE = re.compile(r"<DOC>(.*?)</DOC>", re.S)
_TREC_DOCNO_RE = re.compile(r"<DOCNO>\s*(.*?)\s*</DOCNO>", re.S)
_TREC_TEXT_RE = re.compile(r"<TEXT>(.*?)</TEXT>", re.S)


def _parse_trec_text(source, strict) -> Iterator[RawDocument]:
    source = _normalize_source(source)
    paths = _input_files(source, ("*",))
    for path_or_text in paths:
        text = _read_text(path_or_text)
        for block in _TREC_DOC_RE.finditer(text):
            body = block.group(1)
            docno = _TREC_DOCNO_RE.search(body)
            if not docno:
                _handle_bad(strict, "TREC DOC without DOCNO")
                continue
            texts = _TREC_TEXT_RE.findall(body)
            yield RawDocument(
                external_id=docno.group(1),
                fields={"body": "\n".join(t.strip() for t in texts)},
            )


_REUTERS_DOC_RE = re.compile(r"<REUTERS([^>]*)>(.*?)</REUTERS>", re.S)
_REUTERS_NEWID_RE = re.compile(r'NEWID="(\d+)"')
_REUTERS_TOPICS_RE = re.compile(r"<TOPICS>(.*?)</TOPICS>", re.S)
_REUTERS_D_RE = re.compile(r"<D>(.*?)</D>", re.S)
_REUTERS_TITLE_RE = re.compile(r"<TITLE>(.*?)</TITLE>", re.S)
_REUTERS_BODY_RE = re.compile(r"<BODY>(.*?)</BODY>", re.S)
_CTRL_RE = re.compile(r"[\x00-\x08\x0b\x0c\x0e-\x1f]")


def _sgml_text(raw: str) -> str:
    return _CTRL_RE.sub("", html.unescape(raw)).strip()


def _parse_reuters_sgml(source, strict) -> Iterator[RawDocument]:
    source = _normalize_source(source)
    for path_or_text in _input_files(source, ("*.sgm", "*.sgml")):
        text = _read_text(path_or_text)
        for m in _REUTERS_DOC_RE.finditer(text):
            attrs, body = m.group(1), m.group(2)
            newid = _REUTERS_NEWID_RE.search(attrs)
            if not newid:
                _handle_bad(strict, "REUTERS record without NEWID")
                continue
            labels = []
            topics = _REUTERS_TOPICS_RE.search(body)
            if topics:
                labels = [_sgml_text(d) for d in _REUTERS_D_RE.findall(topics.group(1))]
            fields = {}
            title = _REUTERS_TITLE_RE.search(body)
            if title:
                fields["title"] = _sgml_text(title.group(1))
            btext = _REUTERS_BODY_RE.search(body)
            if btext:
                fields["body"] = _sgml_text(btext.group(1))
            yield RawDocument(external_id=newid.group(1), labels=labels, fields=fields)


def _input_files(source, patterns) -> Iterable:
    """Yield file paths under a directory (lexicographic), or the source itself."""
    if isinstance(source, Path) and source.is_dir():
        files = set()
        for pat in patterns:
            files.update(p for p in source.rglob(pat) if p.is_file())
        yield from sorted(files)
    else:
        yield source


def _parse_file_dir(root: Path, strip: bool, strict) -> Iterator[RawDocument]:
    if not isinstance(root, Path) or not root.is_dir():
        raise IngestError(f"{root} is not a directory")
    for path in sorted(p for p in root.rglob("*") if p.is_file()):
        text = _read_text(path)
        if strip:
            text = strip_html(text)
        yield RawDocument(
            external_id=path.relative_to(root).as_posix(),
            fields={"body": text},
        )


def _parse_txt_dir(source, strict):
    return _parse_file_dir(_normalize_source(source), strip=False, strict=strict)


def _parse_html_dir(source, strict):
    return _parse_file_dir(_normalize_source(source), strip=True, strict=strict)


_PARSERS = {
    SourceFormat.JSONL: _parse_jsonl,
    SourceFormat.TWITTER_JSONL: _parse_twitter_jsonl,
    SourceFormat.TREC_TEXT: _parse_trec_text,
    SourceFormat.REUTERS_SGML: _parse_reuters_sgml,
    SourceFormat.TXT_DIR: _parse_txt_dir,
    SourceFormat.HTML_DIR: _parse_html_dir,
}
