"""
Unit tests for LLM providers
"""

import json
import pytest
import requests
import sys
import os
from pathlib import Path
from unittest.mock import Mock, patch

# Add utils to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'utils'))

from llm_client import (
    LiveProvider,
    ProviderConfig,
    ProviderConfigError,
    ProviderError,
    ProviderKind,
    RecordingProvider,
    ReplayMiss,
    ReplayProvider,
    TranscriptRecord,
    create_provider,
    load_transcript,
)
from prompt_composer import build_preset, prompt_digest

FIXTURES_DIR = Path(__file__).resolve().parent.parent / 'fixtures' / 'replay'


def live_config(**overrides):
    values = dict(
        name='local',
        kind=ProviderKind.LIVE,
        endpoint='http://localhost:8000/v1/chat/completions',
        model='test-model',
        backoff=0.0,
    )
    values.update(overrides)
    return ProviderConfig(**values)


def completion(content, status_code=200):
    response = Mock()
    response.status_code = status_code
    response.json.return_value = {'choices': [{'message': {'content': content}}]}
    return response


class TestProviderConfig:
    """Test cases for provider configuration"""

    def test_from_dict(self):
        config = ProviderConfig.from_dict({'name': 'gpt-4', 'kind': 'replay', 'fixtures_dir': 'fixtures'})
        assert config.kind == ProviderKind.REPLAY
        assert config.temperature == 1.0

    def test_relative_paths_resolve_against_base_dir(self, tmp_path):
        config = ProviderConfig.from_dict({'name': 'x', 'fixtures_dir': 'replay'}, base_dir=tmp_path)
        assert config.fixtures_dir == str((tmp_path / 'replay').resolve())

    def test_unknown_field(self):
        with pytest.raises(ProviderConfigError, match='Unknown provider fields'):
            ProviderConfig.from_dict({'name': 'x', 'fixtures_dir': 'f', 'temprature': 0.5})

    def test_unknown_kind(self):
        with pytest.raises(ProviderConfigError):
            ProviderConfig.from_dict({'name': 'x', 'kind': 'batch'})

    def test_live_needs_endpoint(self):
        with pytest.raises(ProviderConfigError):
            ProviderConfig(name='x', kind=ProviderKind.LIVE, model='m').validate()

    def test_replay_needs_source(self):
        with pytest.raises(ProviderConfigError):
            ProviderConfig(name='x').validate()


class TestLiveProvider:
    """Test cases for the chat-completion provider"""

    @patch('requests.post')
    def test_complete_success(self, mock_post):
        """Test a single user message is sent and the content returned"""
        mock_post.return_value = completion('BasicGame')
        provider = LiveProvider(live_config(temperature=0.7))

        assert provider.complete(build_preset('P1')) == 'BasicGame'
        payload = mock_post.call_args.kwargs['json']
        assert payload['model'] == 'test-model'
        assert payload['temperature'] == 0.7
        assert payload['messages'] == [{'role': 'user', 'content': build_preset('P1').text}]

    @patch('requests.post')
    def test_system_message(self, mock_post):
        """Test the optional system message precedes the prompt"""
        mock_post.return_value = completion('ok')
        LiveProvider(live_config(system_message='You write VGDL.')).complete('hi')
        messages = mock_post.call_args.kwargs['json']['messages']
        assert messages[0] == {'role': 'system', 'content': 'You write VGDL.'}

    @patch('requests.post')
    def test_rejected_credentials(self, mock_post):
        """Test 401 fails at once without retrying"""
        mock_post.return_value = completion('', status_code=401)
        with pytest.raises(ProviderError, match='authentication'):
            LiveProvider(live_config()).complete('hi')
        assert mock_post.call_count == 1

    @patch('requests.post')
    def test_retries_then_fails(self, mock_post):
        """Test network failures are retried max_retries times"""
        mock_post.side_effect = requests.exceptions.ConnectionError('refused')
        with pytest.raises(ProviderError):
            LiveProvider(live_config(max_retries=3)).complete('hi')
        assert mock_post.call_count == 3

    @patch('requests.post')
    def test_retry_recovers(self, mock_post):
        mock_post.side_effect = [requests.exceptions.Timeout('slow'), completion('second try')]
        assert LiveProvider(live_config()).complete('hi') == 'second try'

    @patch('requests.post')
    def test_malformed_payload(self, mock_post):
        response = completion('')
        response.json.return_value = {'choices': []}
        mock_post.return_value = response
        with pytest.raises(ProviderError, match='malformed'):
            LiveProvider(live_config()).complete('hi')

    def test_missing_credential_variable(self, monkeypatch):
        monkeypatch.delenv('VGDL_FORGE_TEST_KEY', raising=False)
        provider = LiveProvider(live_config(auth_env='VGDL_FORGE_TEST_KEY'))
        with pytest.raises(ProviderError, match='VGDL_FORGE_TEST_KEY'):
            provider.complete('hi')


class TestReplayProvider:
    """Test cases for replay from fixtures and transcripts"""

    def test_fixture_by_preset(self):
        provider = ReplayProvider(ProviderConfig(name='gpt-4', fixtures_dir=str(FIXTURES_DIR)))
        expected = (FIXTURES_DIR / 'gpt-4' / 'p7.txt').read_text(encoding='utf-8')
        assert provider.complete(build_preset('P7')) == expected
        assert provider.complete('any text', preset='p7') == expected

    def test_fixture_provider_alias(self):
        config = ProviderConfig(name='other', fixtures_dir=str(FIXTURES_DIR), fixture_provider='gemma-7b')
        text = ReplayProvider(config).complete('x', preset='P2')
        assert text == (FIXTURES_DIR / 'gemma-7b' / 'p2.txt').read_text(encoding='utf-8')

    def test_fixture_round_robin(self, tmp_path):
        folder = tmp_path / 'model'
        folder.mkdir()
        (folder / 'p1.txt').write_text('plain')
        (folder / 'p1.2.txt').write_text('numbered')
        (folder / 'p10.txt').write_text('unrelated')
        provider = ReplayProvider(ProviderConfig(name='model', fixtures_dir=str(tmp_path)))
        answers = [provider.complete('x', preset='P1') for _ in range(3)]
        assert answers == ['numbered', 'plain', 'numbered']

    def test_transcript_cycles_in_recorded_order(self, tmp_path):
        path = tmp_path / 'transcript.jsonl'
        digest = prompt_digest('prompt')
        with open(path, 'w', encoding='utf-8') as f:
            for response in ('a', 'b'):
                record = TranscriptRecord(digest, 'prompt', response, 'm', 'm')
                f.write(record.to_json() + '\n')
            f.write('not json\n')
        provider = ReplayProvider(ProviderConfig(name='m', transcript_path=str(path)))
        assert [provider.complete('prompt') for _ in range(3)] == ['a', 'b', 'a']

    def test_replay_miss(self, tmp_path):
        provider = ReplayProvider(ProviderConfig(name='empty', fixtures_dir=str(tmp_path)))
        with pytest.raises(ReplayMiss):
            provider.complete(build_preset('P3'))

    def test_replay_miss_is_provider_error(self):
        assert issubclass(ReplayMiss, ProviderError)


class TestRecordingProvider:
    """Test cases for recording live exchanges"""

    @patch('requests.post')
    def test_record_then_replay(self, mock_post, tmp_path):
        """Test a recorded session replays byte-identically"""
        responses = ['first answer', 'second answer\nwith two lines']
        mock_post.side_effect = [completion(text) for text in responses]
        transcript = tmp_path / 'session.jsonl'
        config = live_config(transcript_path=str(transcript))

        recorder = create_provider(config)
        assert isinstance(recorder, RecordingProvider)
        prompt = build_preset('P4')
        live = [recorder.complete(prompt) for _ in range(2)]

        records = load_transcript(transcript)
        assert [record.response for record in records] == responses
        assert records[0].prompt_hash == prompt.prompt_hash
        assert records[0].model == 'test-model'
        assert json.loads(transcript.read_text(encoding='utf-8').splitlines()[0])['provider'] == 'local'

        replay = ReplayProvider(ProviderConfig(name='local', transcript_path=str(transcript)))
        assert [replay.complete(prompt) for _ in range(2)] == live

    def test_missing_transcript_is_empty(self, tmp_path):
        assert load_transcript(tmp_path / 'none.jsonl') == []


if __name__ == '__main__':
    pytest.main([__file__])
