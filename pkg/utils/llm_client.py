"""
Chat-completion providers: live HTTP, transcript/fixture replay and recording
"""

import json
import logging
import os
import threading
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional

import requests
from dotenv import load_dotenv

from prompt_composer import prompt_digest

load_dotenv()
logger = logging.getLogger(__name__)


class ProviderKind(str, Enum):
    LIVE = 'live'
    REPLAY = 'replay'


class ProviderError(Exception):
    """Network, timeout, credential or protocol failure of a provider"""


class ReplayMiss(ProviderError):
    """No recorded response exists for a prompt"""


class ProviderConfigError(ValueError):
    """Invalid provider configuration"""


@dataclass(frozen=True)
class ProviderConfig:
    name: str
    kind: ProviderKind = ProviderKind.REPLAY
    endpoint: Optional[str] = None
    model: Optional[str] = None
    temperature: float = 1.0
    timeout: float = 60.0
    auth_env: Optional[str] = None
    transcript_path: Optional[str] = None
    fixtures_dir: Optional[str] = None
    fixture_provider: Optional[str] = None
    max_in_flight: int = 4
    max_retries: int = 3
    backoff: float = 1.0
    system_message: str = ''

    def validate(self):
        if not self.name:
            raise ProviderConfigError('Provider name is required')
        if self.temperature < 0:
            raise ProviderConfigError(f'{self.name}: temperature must be >= 0')
        if self.kind is ProviderKind.LIVE:
            if not self.endpoint or not self.model:
                raise ProviderConfigError(f'{self.name}: live providers need endpoint and model')
        elif not self.transcript_path and not self.fixtures_dir:
            raise ProviderConfigError(f'{self.name}: replay providers need transcript_path or fixtures_dir')
        return self

    @classmethod
    def from_dict(cls, data, base_dir=None):
        """
        Build a config from a YAML/JSON mapping

        Args:
            data (dict): Provider entry
            base_dir (Path): Directory relative paths are resolved against

        Returns:
            ProviderConfig: Validated configuration
        """
        values = dict(data)
        try:
            values['kind'] = ProviderKind(values.get('kind', 'replay'))
        except ValueError:
            raise ProviderConfigError(f"Unknown provider kind '{values.get('kind')}'")
        for key in ('transcript_path', 'fixtures_dir'):
            if values.get(key) and base_dir is not None and not os.path.isabs(values[key]):
                values[key] = str((Path(base_dir) / values[key]).resolve())
        known = set(cls.__dataclass_fields__)
        unknown = set(values) - known
        if unknown:
            raise ProviderConfigError(f"Unknown provider fields: {', '.join(sorted(unknown))}")
        return cls(**values).validate()

    @property
    def model_label(self):
        return self.model or self.fixture_provider or self.name


@dataclass(frozen=True)
class TranscriptRecord:
    prompt_hash: str
    prompt: str
    response: str
    provider: str
    model: str
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def to_json(self):
        return json.dumps(asdict(self), ensure_ascii=False, sort_keys=True)


def load_transcript(path) -> List[TranscriptRecord]:
    """Read a line-delimited transcript; a missing file is an empty transcript"""
    path = Path(path)
    if not path.exists():
        return []
    records = []
    with open(path, 'r', encoding='utf-8') as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                records.append(TranscriptRecord(**json.loads(line)))
            except (json.JSONDecodeError, TypeError) as e:
                logger.warning(f'Skipping bad transcript line {path}:{lineno}: {str(e)}')
    return records


def _prompt_text(prompt):
    return prompt.text if hasattr(prompt, 'text') else str(prompt)


def _prompt_preset(prompt, preset):
    return preset or getattr(prompt, 'preset', None)


class LiveProvider:
    """OpenAI-compatible chat-completion provider"""

    def __init__(self, config):
        self.config = config.validate()
        self.name = config.name
        self._slots = threading.BoundedSemaphore(max(1, config.max_in_flight))

        if config.auth_env and not os.getenv(config.auth_env):
            logger.warning(f'{config.auth_env} not set. Requests from {config.name} will fail.')

    def _headers(self):
        headers = {'Content-Type': 'application/json'}
        if self.config.auth_env:
            credential = os.getenv(self.config.auth_env)
            if not credential:
                raise ProviderError(f'{self.name}: credential variable {self.config.auth_env} is not set')
            headers['Authorization'] = f'Bearer {credential}'
        return headers

    def _payload(self, text):
        messages = []
        if self.config.system_message:
            messages.append({'role': 'system', 'content': self.config.system_message})
        messages.append({'role': 'user', 'content': text})
        return {
            'model': self.config.model,
            'messages': messages,
            'temperature': self.config.temperature,
        }

    def _make_request(self, text):
        """Make one chat-completion request"""
        response = requests.post(
            self.config.endpoint,
            headers=self._headers(),
            json=self._payload(text),
            timeout=self.config.timeout,
        )
        if response.status_code in (401, 403):
            raise ProviderError(f'{self.name}: authentication rejected ({response.status_code})')
        response.raise_for_status()
        try:
            return response.json()['choices'][0]['message']['content']
        except (ValueError, KeyError, IndexError, TypeError) as e:
            raise ProviderError(f'{self.name}: malformed completion payload: {str(e)}')

    def complete(self, prompt, preset=None):
        """
        Send a prompt as a single user message

        Args:
            prompt (PromptText or str): Prompt to send
            preset (str): Unused by live providers

        Returns:
            str: Assistant message text

        Raises:
            ProviderError: After max_retries failed attempts
        """
        text = _prompt_text(prompt)
        attempts = max(1, self.config.max_retries)
        with self._slots:
            for attempt in range(attempts):
                try:
                    return self._make_request(text)
                except requests.exceptions.RequestException as e:
                    logger.warning(f'{self.name}: attempt {attempt + 1}/{attempts} failed: {str(e)}')
                    if attempt + 1 < attempts:
                        time.sleep(self.config.backoff * (2 ** attempt))
        raise ProviderError(f'{self.name}: no response after {attempts} attempts')


class ReplayProvider:
    """
    Deterministic provider over recorded exchanges.

    Lookup order: transcript records by prompt hash (repeats of one prompt
    are served in recorded order, cycling), then fixture files registered
    under (provider, preset), served round-robin.
    """

    def __init__(self, config):
        self.config = config.validate()
        self.name = config.name
        self._lock = threading.Lock()
        self._by_hash: Dict[str, List[str]] = {}
        self._cursors: Dict[str, int] = {}

        if config.transcript_path:
            for record in load_transcript(config.transcript_path):
                self._by_hash.setdefault(record.prompt_hash, []).append(record.response)
            logger.info(f'{self.name}: loaded {len(self._by_hash)} recorded prompts')

    def fixture_files(self, preset):
        if not self.config.fixtures_dir or not preset:
            return []
        folder = Path(self.config.fixtures_dir) / (self.config.fixture_provider or self.name)
        stem = preset.lower()
        return sorted(
            path for path in folder.glob(f'{stem}*.txt')
            if path.stem == stem or path.stem.startswith(f'{stem}.')
        )

    def _next(self, key, responses):
        with self._lock:
            index = self._cursors.get(key, 0)
            self._cursors[key] = index + 1
        return responses[index % len(responses)]

    def complete(self, prompt, preset=None):
        """
        Return the recorded response for a prompt

        Args:
            prompt (PromptText or str): Prompt to look up
            preset (str): Preset used for fixture lookup; read from the
                PromptText when omitted

        Returns:
            str: Recorded response

        Raises:
            ReplayMiss: If nothing is recorded for the prompt
        """
        digest = prompt_digest(_prompt_text(prompt))
        if digest in self._by_hash:
            return self._next(digest, self._by_hash[digest])

        preset = _prompt_preset(prompt, preset)
        files = self.fixture_files(preset)
        if files:
            path = self._next(f'fixture:{preset.upper()}', files)
            return path.read_text(encoding='utf-8')

        logger.warning(f'{self.name}: no recorded response for prompt {digest[:12]} (preset {preset})')
        raise ReplayMiss(f'{self.name}: no recorded response for prompt {digest[:12]}')


class RecordingProvider:
    """Wraps a provider and appends every exchange to a transcript"""

    def __init__(self, inner, transcript_path):
        self.inner = inner
        self.name = inner.name
        self.config = inner.config
        self.transcript_path = Path(transcript_path)
        self._lock = threading.Lock()

    def complete(self, prompt, preset=None):
        text = _prompt_text(prompt)
        response = self.inner.complete(prompt, preset)
        record = TranscriptRecord(
            prompt_hash=prompt_digest(text),
            prompt=text,
            response=response,
            provider=self.name,
            model=self.config.model_label,
        )
        with self._lock:
            self.transcript_path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.transcript_path, 'a', encoding='utf-8') as f:
                f.write(record.to_json() + '\n')
        return response


def create_provider(config):
    """
    Instantiate the provider for a configuration

    Args:
        config (ProviderConfig): Provider configuration

    Returns:
        Provider with a complete(prompt, preset=None) method
    """
    config.validate()
    if config.kind is ProviderKind.LIVE:
        provider = LiveProvider(config)
        if config.transcript_path:
            return RecordingProvider(provider, config.transcript_path)
        return provider
    return ReplayProvider(config)


def complete(prompt, config):
    """One-shot completion with a freshly created provider"""
    return create_provider(config).complete(prompt)
