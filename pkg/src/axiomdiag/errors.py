"""Exception types shared across the toolkit."""


class DataError(Exception):
    """Malformed or inconsistent input data (corpus, run, qrels, scores)."""


class ProtocolError(Exception):
    """External scorer violated the line-delimited JSON wire protocol."""
