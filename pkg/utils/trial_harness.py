"""
Trial harness: run generation trials per (provider, preset), classify every
response, journal the records and tabulate them into report tables
"""

import io
import json
import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Optional

import pandas as pd

from llm_client import ProviderError, ProviderKind, ReplayMiss, create_provider
from prompt_composer import DEFAULT_GAME_NAME, PRESET_IDS, build_preset, normalize_preset_id
from response_extractor import ExtractionError, extract_candidates
from vgdl_engine import DEFAULT_MAX_STEPS, EngineError, SolveVerdict, solve
from vgdl_validator import ErrorCode, Outcome, validate_candidate

logger = logging.getLogger(__name__)

JOURNAL_NAME = 'journal.jsonl'
RENDER_FORMATS = ('text', 'tsv', 'jsonl')

COUNT_COLUMNS = ['trials', 'errored', 'parsable', 'logical', 'mappable', 'correct', 'winnable']
CODE_COLUMNS = [code.value for code in ErrorCode]
OUTCOME_COLUMNS = [outcome.value for outcome in Outcome]
TABLE_COLUMNS = COUNT_COLUMNS + CODE_COLUMNS + OUTCOME_COLUMNS
KEY_COLUMNS = ['provider', 'preset']


class HarnessAbort(Exception):
    """Every provider call failed; nothing could be classified"""


@dataclass
class TrialRecord:
    provider: str
    preset: str
    trial_index: int
    prompt_hash: str
    model: Optional[str] = None
    response: Optional[str] = None
    extraction: Optional[dict] = None
    report: Optional[dict] = None
    outcome: Optional[str] = None
    codes: List[str] = field(default_factory=list)
    solvable: Optional[str] = None
    solve_steps: Optional[int] = None
    wall_time: float = 0.0
    error: Optional[str] = None

    @property
    def errored(self):
        return self.error is not None

    @property
    def key(self):
        return self.provider, self.preset, self.trial_index

    def to_json(self):
        return json.dumps(asdict(self), ensure_ascii=False, sort_keys=True, separators=(',', ':'))

    @classmethod
    def from_json(cls, line):
        return cls(**json.loads(line))


def classify_response(response, options=None, max_steps=DEFAULT_MAX_STEPS):
    """
    Extract, validate and (when correct) solve one response

    Args:
        response (str): Raw model output
        options (ValidatorOptions): Validator configuration
        max_steps (int): Solver depth budget

    Returns:
        dict: extraction, report, outcome, codes, solvable and solve_steps fields
    """
    try:
        candidates = extract_candidates(response)
    except ExtractionError as e:
        return {
            'extraction': {'error': e.reason.value, 'message': str(e)},
            'report': None,
            'outcome': Outcome.W.value,
            'codes': [ErrorCode.SYNTAX.value],
            'solvable': None,
            'solve_steps': None,
        }

    report = validate_candidate(candidates[0], options)
    fields = {
        'extraction': {'candidates': [candidate.to_dict() for candidate in candidates]},
        'report': report.to_dict(),
        'outcome': report.outcome.value,
        'codes': [code.value for code in report.codes()],
        'solvable': None,
        'solve_steps': None,
    }
    if report.correct:
        try:
            result = solve(report.spec, report.level, max_steps)
            fields['solvable'] = result.verdict.value
            fields['solve_steps'] = result.steps
        except EngineError as e:
            logger.warning(f'Correct game rejected by the engine: {e}')
    return fields


def append_record(path, record, lock=None):
    """Append one record to a journal"""
    line = record.to_json() + '\n'
    if lock is None:
        with open(path, 'a', encoding='utf-8') as f:
            f.write(line)
        return
    with lock:
        with open(path, 'a', encoding='utf-8') as f:
            f.write(line)


def load_journal(path):
    """
    Read trial records from a journal

    Args:
        path (str or Path): Line-delimited journal; a missing file is empty

    Returns:
        list: TrialRecord per readable line
    """
    path = Path(path)
    if not path.exists():
        return []
    records = []
    with open(path, 'r', encoding='utf-8') as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                records.append(TrialRecord.from_json(line))
            except (json.JSONDecodeError, TypeError) as e:
                logger.warning(f'Skipping bad journal line {path}:{lineno}: {str(e)}')
    return records


def _ordered_presets(presets):
    if presets in (None, 'all'):
        return list(PRESET_IDS)
    if isinstance(presets, str):
        presets = presets.split(',')
    wanted = {normalize_preset_id(preset_id) for preset_id in presets}
    return [preset_id for preset_id in PRESET_IDS if preset_id in wanted]


def run_trials(
    presets,
    provider_cfgs,
    n,
    game_name=DEFAULT_GAME_NAME,
    journal_path=None,
    resume=False,
    max_workers=1,
    max_steps=DEFAULT_MAX_STEPS,
    options=None,
):
    """
    Run n trials for every (provider, preset) pair

    Args:
        presets (iterable or str): Preset ids, or 'all'
        provider_cfgs (list): ProviderConfig per provider
        n (int): Trials per pair
        game_name (str): Game named in the prompt
        journal_path (str or Path): Journal file; records are appended as they finish
        resume (bool): Keep the journal and skip trials already in it
        max_workers (int): Pairs run concurrently; trials within a pair run in order
        max_steps (int): Solver depth budget
        options (ValidatorOptions): Validator configuration

    Returns:
        list: TrialRecord per trial in (provider, preset, index) order

    Raises:
        HarnessAbort: When every provider call failed with a network-level error
    """
    if n < 1:
        raise ValueError(f'Trial count must be >= 1, got {n}')

    preset_ids = _ordered_presets(presets)
    prompts = {preset_id: build_preset(preset_id, game_name) for preset_id in preset_ids}

    done = {}
    lock = threading.Lock()
    if journal_path is not None:
        journal_path = Path(journal_path)
        journal_path.parent.mkdir(parents=True, exist_ok=True)
        if resume:
            for record in load_journal(journal_path):
                done[record.key] = record
            logger.info(f'Resuming from {journal_path}: {len(done)} trial(s) already recorded')
        else:
            journal_path.write_text('', encoding='utf-8')

    network_failures = []
    attempted = []

    def run_pair(config, provider, preset_id):
        prompt = prompts[preset_id]
        records = []
        for index in range(n):
            key = (config.name, preset_id, index)
            if key in done:
                records.append(done[key])
                continue

            start = time.perf_counter()
            record = TrialRecord(
                provider=config.name,
                preset=preset_id,
                trial_index=index,
                prompt_hash=prompt.prompt_hash,
                model=config.model_label,
            )
            try:
                record.response = provider.complete(prompt, preset_id)
            except ProviderError as e:
                record.error = str(e)
                if not isinstance(e, ReplayMiss):
                    network_failures.append(key)
                logger.error(f'Trial {config.name}/{preset_id}/{index} errored: {str(e)}')
            attempted.append(key)

            if record.response is not None:
                for name, value in classify_response(record.response, options, max_steps).items():
                    setattr(record, name, value)
                logger.info(f'Trial {config.name}/{preset_id}/{index}: {record.outcome} {record.codes}')
            if config.kind is ProviderKind.LIVE:
                record.wall_time = round(time.perf_counter() - start, 3)

            if journal_path is not None:
                append_record(journal_path, record, lock)
            records.append(record)
        return records

    jobs = []
    for config in provider_cfgs:
        provider = create_provider(config)
        for preset_id in preset_ids:
            jobs.append((config, provider, preset_id))

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            results = list(executor.map(lambda job: run_pair(*job), jobs))
    else:
        results = [run_pair(*job) for job in jobs]

    if attempted and len(network_failures) == len(attempted):
        raise HarnessAbort(f'All {len(attempted)} provider calls failed; no provider is reachable')

    return [record for records in results for record in records]


class ReportTable:
    """Per (provider, preset) counts: verdicts, error codes and outcome classes"""

    def __init__(self, frame=None):
        if frame is None:
            index = pd.MultiIndex.from_tuples([], names=KEY_COLUMNS)
            frame = pd.DataFrame(columns=TABLE_COLUMNS, index=index, dtype=int)
        self.frame = frame[TABLE_COLUMNS].astype(int).sort_index()

    def __len__(self):
        return len(self.frame)

    def __add__(self, other):
        summed = self.frame.add(other.frame, fill_value=0)
        return ReportTable(summed)

    def __eq__(self, other):
        return isinstance(other, ReportTable) and self.frame.equals(other.frame)

    def row(self, provider, preset):
        """Counts of one row as a dict"""
        return {name: int(value) for name, value in self.frame.loc[(provider, preset)].items()}

    def check(self):
        """Rows breaking G+R+L+W = trials or correct <= min(parsable, mappable)"""
        problems = []
        for (provider, preset), row in self.frame.iterrows():
            if row[OUTCOME_COLUMNS].sum() != row['trials']:
                problems.append(f"{provider}/{preset}: outcomes do not sum to {row['trials']}")
            if row['correct'] > min(row['parsable'], row['mappable']):
                problems.append(f'{provider}/{preset}: correct exceeds parsable or mappable')
        return problems

    def display_frame(self):
        """Frame with null Logical cells for rows without a parsable trial"""
        frame = self.frame.reset_index().astype(object)
        frame.loc[frame['parsable'] == 0, 'logical'] = None
        return frame


def _record_row(record):
    row = dict.fromkeys(TABLE_COLUMNS, 0)
    if record.errored:
        row['errored'] = 1
        return row
    report = record.report or {}
    row['trials'] = 1
    row['parsable'] = int(bool(report.get('parsable')))
    row['logical'] = int(bool(report.get('logical')))
    row['mappable'] = int(bool(report.get('mappable')))
    row['correct'] = int(bool(report.get('correct')))
    row['winnable'] = int(record.solvable == SolveVerdict.WINNABLE.value)
    for code in set(record.codes):
        if code in row:
            row[code] = 1
    if record.outcome in OUTCOME_COLUMNS:
        row[record.outcome] = 1
    return row


def tabulate(records):
    """
    Aggregate trial records

    Args:
        records (list): TrialRecord list

    Returns:
        ReportTable: One row per (provider, preset); each error code counts once per trial
    """
    if not records:
        return ReportTable()
    rows = []
    for record in records:
        row = _record_row(record)
        row['provider'] = record.provider
        row['preset'] = record.preset
        rows.append(row)
    frame = pd.DataFrame(rows).groupby(KEY_COLUMNS)[TABLE_COLUMNS].sum()
    return ReportTable(frame)


def _text_table(frame, columns, headers):
    cells = [[str(value) if value is not None else '-' for value in frame[column]] for column in columns]
    widths = [max([len(header)] + [len(cell) for cell in column]) for header, column in zip(headers, cells)]
    lines = [' '.join(header.ljust(width) if i < 2 else header.rjust(width)
                      for i, (header, width) in enumerate(zip(headers, widths))).rstrip()]
    for r in range(len(frame)):
        lines.append(' '.join(
            cells[i][r].ljust(widths[i]) if i < 2 else cells[i][r].rjust(widths[i])
            for i in range(len(columns))
        ).rstrip())
    return '\n'.join(lines)


def render(table, fmt='text'):
    """
    Render a report table

    Args:
        table (ReportTable): Aggregated counts
        fmt (str): text, tsv or jsonl

    Returns:
        bytes: UTF-8 encoded report
    """
    if fmt not in RENDER_FORMATS:
        raise ValueError(f"Unknown format '{fmt}'. Available formats: {', '.join(RENDER_FORMATS)}")
    frame = table.display_frame()

    if fmt == 'tsv':
        buffer = io.StringIO()
        frame[KEY_COLUMNS + TABLE_COLUMNS].to_csv(buffer, sep='\t', index=False, na_rep='null',
                                                 lineterminator='\n')
        return buffer.getvalue().encode('utf-8')

    if fmt == 'jsonl':
        lines = []
        for row in frame.to_dict(orient='records'):
            entry = {
                'provider': row['provider'],
                'preset': row['preset'],
                'errors': {code: int(row[code]) for code in CODE_COLUMNS},
                'outcomes': {outcome: int(row[outcome]) for outcome in OUTCOME_COLUMNS},
            }
            for column in COUNT_COLUMNS:
                entry[column] = None if row[column] is None else int(row[column])
            lines.append(json.dumps(entry, sort_keys=True, separators=(',', ':')))
        return ''.join(line + '\n' for line in lines).encode('utf-8')

    result_headers = ['Provider', 'Preset', 'Trials', 'Parsable', 'Logical', 'Mappable', 'Correct',
                      'Winnable', 'Errored']
    result_columns = ['provider', 'preset', 'trials', 'parsable', 'logical', 'mappable', 'correct',
                      'winnable', 'errored']
    error_headers = ['Provider', 'Preset'] + [code.label for code in ErrorCode] + OUTCOME_COLUMNS
    error_columns = KEY_COLUMNS + CODE_COLUMNS + OUTCOME_COLUMNS

    text = (
        'Results\n'
        + _text_table(frame, result_columns, result_headers)
        + '\n\nErrors\n'
        + _text_table(frame, error_columns, error_headers)
        + '\n'
    )
    return text.encode('utf-8')


def report_from_journal(path, fmt='text'):
    return render(tabulate(load_journal(path)), fmt)
