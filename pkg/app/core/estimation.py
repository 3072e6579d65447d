"""Estimate VBE from observed vote histories.

Votes reveal the sign of each player's utility, so clustering equal
ordinal rows reproduces the epsilon-threshold clustering of the hidden
utilities.
"""

import csv
import io
import logging

from pydantic import ValidationError

from app.core.metrics import cluster, entropy
from app.models.history import OrdinalUtilityMatrix, VoteHistory, VoteRecord
from app.models.metrics import ClusteringSpec, EntropySpec, Partition
from app.models.scenario import Scenario, Vote
from app.schemas.history import BalanceRow, VoteRow
from app.utils.exceptions import DuplicateVoteException, HistoryParseException

logger = logging.getLogger(__name__)

VOTE_HEADER = ("voter", "election", "vote")
BALANCE_HEADER = ("voter", "tokens")

ORDINAL = {Vote.TRUE: 1, Vote.FALSE: -1, Vote.ABSTAIN: 0}


def _decode(data: bytes | str) -> str:
    if isinstance(data, bytes):
        try:
            return data.decode("utf-8-sig")
        except UnicodeDecodeError as e:
            raise HistoryParseException(f"file is not UTF-8: {e}") from e
    return data


def _rows(data: bytes | str, header: tuple, row_model, label: str) -> list:
    reader = csv.DictReader(io.StringIO(_decode(data)))
    if reader.fieldnames is None:
        raise HistoryParseException(f"{label} file is empty")
    fields = tuple(f.strip() for f in reader.fieldnames)
    if fields != header:
        raise HistoryParseException(f"{label} header must be {','.join(header)}, got {','.join(fields)}")

    rows = []
    for line, raw in enumerate(reader, start=2):
        if None in raw or any(v is None for v in raw.values()):
            raise HistoryParseException(f"{label} line {line}: wrong number of columns")
        try:
            rows.append(row_model(**{k.strip(): v for k, v in raw.items()}))
        except ValidationError as e:
            raise HistoryParseException(f"{label} line {line}: {e.errors()[0]['msg']}") from e
    return rows


def parse_history(votes_csv: bytes | str, balances_csv: bytes | str) -> VoteHistory:
    vote_rows = _rows(votes_csv, VOTE_HEADER, VoteRow, "votes")
    balance_rows = _rows(balances_csv, BALANCE_HEADER, BalanceRow, "balances")
    return build_history(vote_rows, {row.voter: row.tokens for row in _unique_balances(balance_rows)})


def _unique_balances(rows: list[BalanceRow]) -> list[BalanceRow]:
    seen = set()
    for row in rows:
        if row.voter in seen:
            raise HistoryParseException(f"duplicate balance for voter {row.voter}")
        seen.add(row.voter)
    return rows


def build_history(vote_rows, balances) -> VoteHistory:
    """Validate parsed rows into a VoteHistory"""
    seen = set()
    records = []
    for row in vote_rows:
        key = (row.voter, row.election)
        if key in seen:
            raise DuplicateVoteException(f"duplicate vote for ({row.voter}, {row.election})")
        seen.add(key)
        if row.voter not in balances:
            raise HistoryParseException(f"voter {row.voter} has no balance")
        records.append(VoteRecord(row.voter, row.election, Vote(row.vote)))

    history = VoteHistory(records=records, balances=balances)
    logger.info(
        f"Parsed history: {len(records)} votes, {len(history.voters)} voters, "
        f"{len(history.elections)} elections"
    )
    return history


def infer_ordinal(history: VoteHistory) -> OrdinalUtilityMatrix:
    """true -> +1, false -> -1, abstain or no record -> 0"""
    entries = {(v, e): 0 for v in history.voters for e in history.elections}
    for record in history.records:
        entries[(record.voter, record.election)] = ORDINAL[record.vote]
    return OrdinalUtilityMatrix(voters=history.voters, elections=history.elections, entries=entries)


def ordinal_scenario(history: VoteHistory) -> Scenario:
    matrix = infer_ordinal(history)
    return Scenario(
        players=matrix.voters,
        tokens=history.balances,
        elections=matrix.elections,
        utilities={v: {e: float(matrix.entries[(v, e)]) for e in matrix.elections} for v in matrix.voters},
        epsilon=0.0,
    )


def estimate_vbe(history: VoteHistory, f: EntropySpec | None = None) -> tuple[float, Partition]:
    scenario = ordinal_scenario(history)
    partition = cluster(scenario, ClusteringSpec.epsilon_toc(0.0))
    return entropy(partition, scenario.tokens, f), partition
