"""
VGDL Forge - Prompt Studio for LLM-generated VGDL games
Main Streamlit Application
"""

import logging
import os
import sys
from dataclasses import replace

import streamlit as st

# Add utils to path
sys.path.append(os.path.join(os.path.dirname(__file__), 'utils'))

from catalog import (
    SAMPLE_MAZE_LEVEL,
    SAMPLE_MAZE_RULES,
    get_popular_games,
    get_preset_description,
    get_preset_list,
    search_games,
)
from prompt_composer import GrammarStyle, build, preset
from provider_manager import provider_manager
from response_extractor import ExtractionError, extract_candidates
from vgdl_engine import EngineError, GridEngine, SolveVerdict
from vgdl_validator import ValidatorOptions, validate
from visualization import avatar_path, create_level_figure
from dotenv import load_dotenv

load_dotenv()
logging.basicConfig(level=os.getenv('VGDL_FORGE_LOG_LEVEL', 'INFO').upper())
logger = logging.getLogger(__name__)

# Page configuration
st.set_page_config(
    page_title="VGDL Forge - Prompt Studio",
    page_icon="🎮",
    layout="wide",
    initial_sidebar_state="expanded"
)

# Custom CSS for styling
st.markdown("""
<style>
    .main-header {
        text-align: center;
        color: #1f77b4;
        font-size: 2.5rem;
        font-weight: bold;
        margin-bottom: 0.5rem;
    }
    .sub-header {
        text-align: center;
        color: #666;
        font-size: 1.2rem;
        margin-bottom: 2rem;
    }
    .outcome-card {
        background-color: #f8f9fa;
        padding: 1rem;
        border-radius: 0.5rem;
        border-left: 4px solid #1f77b4;
        margin-bottom: 1rem;
        text-align: center;
    }
    .positive {
        color: #28a745;
    }
    .negative {
        color: #dc3545;
    }
</style>
""", unsafe_allow_html=True)

# Initialize session state
if 'game_name' not in st.session_state:
    st.session_state.game_name = 'a maze game'
if 'preset_id' not in st.session_state:
    st.session_state.preset_id = 'P7'
if 'response' not in st.session_state:
    st.session_state.response = ''
if 'rules_text' not in st.session_state:
    st.session_state.rules_text = SAMPLE_MAZE_RULES
if 'level_text' not in st.session_state:
    st.session_state.level_text = SAMPLE_MAZE_LEVEL
if 'placement' not in st.session_state:
    st.session_state.placement = None

# Header
st.markdown('<h1 class="main-header">🎮 VGDL Prompt Studio</h1>', unsafe_allow_html=True)
st.markdown('<p class="sub-header">Compose prompts, generate games and check them</p>', unsafe_allow_html=True)

# Sidebar - provider and validator settings
st.sidebar.header("⚙️ Settings")

st.sidebar.subheader("LLM Provider")
available_providers = provider_manager.get_available_providers()
if available_providers:
    provider_name = st.sidebar.selectbox(
        "Provider",
        options=available_providers,
        index=0,
        help="Replay providers serve bundled responses; live providers call a chat-completion API"
    )
    provider_manager.set_provider(provider_name)
    st.sidebar.markdown(f"**Current Provider:** {provider_name}")
else:
    provider_name = None
    st.sidebar.warning("No providers configured")
st.sidebar.markdown(f"**Available Providers:** {len(available_providers)}")

st.sidebar.markdown("---")
st.sidebar.subheader("Validator")
check_alphabet = st.sidebar.checkbox("Require W/A/G level alphabet", value=True)
max_steps = st.sidebar.number_input("Solver step budget", min_value=1, value=1000, step=100)
validator_options = ValidatorOptions(level_alphabet=ValidatorOptions().level_alphabet if check_alphabet else None)

tab1, tab2, tab3 = st.tabs(["📝 Prompt", "🤖 Generate", "✅ Validate & Solve"])

with tab1:
    col1, col2 = st.columns([1, 2])

    with col1:
        st.subheader("Game")
        cols = st.columns(2)
        for i, game in enumerate(get_popular_games()):
            with cols[i % 2]:
                if st.button(game, key=f"game_{i}"):
                    st.session_state.game_name = game

        query = st.text_input("🔍 Search games", placeholder="maze, key, sokoban...")
        if query:
            matches = search_games(query)
            if matches:
                selected = st.selectbox("Matches", matches)
                if st.button("Select Game"):
                    st.session_state.game_name = selected
            else:
                st.info("No matching games")

        st.session_state.game_name = st.text_input("Game name", value=st.session_state.game_name)

        st.subheader("Preset")
        st.session_state.preset_id = st.radio(
            "Context blocks",
            options=get_preset_list(),
            index=get_preset_list().index(st.session_state.preset_id),
            format_func=lambda p: f"{p}: {get_preset_description(p)}"
        )
        grammar_style = st.selectbox(
            "Grammar rendering",
            options=[style.value for style in GrammarStyle],
            help="'normalized' replaces the typeset '>' marker with a plain '>'"
        )
        mechanics = st.text_area("Custom mechanics (optional)", height=100)

    config = preset(st.session_state.preset_id, st.session_state.game_name)
    config = replace(config, mechanics=mechanics or None, grammar_style=GrammarStyle(grammar_style))
    prompt = build(config)

    with col2:
        st.subheader("Prompt")
        st.caption(f"Blocks: {', '.join(block.value for block in prompt.blocks)} | hash {prompt.prompt_hash[:12]}")
        st.code(prompt.text, language=None)

with tab2:
    st.subheader(f"Generate with {provider_name or 'no provider'}")
    if st.button("🤖 Get Response", type="primary", disabled=provider_name is None):
        with st.spinner("Waiting for the model..."):
            response = provider_manager.complete(prompt, provider_name)
        if response is None:
            st.error("Could not get a response. Check the logs and the provider configuration.")
        else:
            st.session_state.response = response
            try:
                candidate = extract_candidates(response)[0]
                st.session_state.rules_text = candidate.rules_text
                st.session_state.level_text = candidate.level_text or ''
                st.session_state.placement = candidate.placement
            except ExtractionError as e:
                st.warning(f"No game description found: {e}")

    if st.session_state.response:
        st.markdown(st.session_state.response)

with tab3:
    col1, col2 = st.columns(2)
    with col1:
        rules_text = st.text_area("Rules", value=st.session_state.rules_text, height=380)
    with col2:
        level_text = st.text_area("Level", value=st.session_state.level_text, height=380)

    report = validate(rules_text, level_text or None, st.session_state.placement, validator_options)

    cols = st.columns(5)
    verdicts = [
        ("Parsable", report.parsable),
        ("Logical", report.logical if report.parsable else None),
        ("Mappable", report.mappable),
        ("Correct", report.correct),
    ]
    for col, (label, value) in zip(cols, verdicts):
        with col:
            css = 'positive' if value else 'negative'
            shown = '-' if value is None else ('✔' if value else '✘')
            st.markdown(f'<div class="outcome-card">{label}<br><span class="{css}">{shown}</span></div>',
                        unsafe_allow_html=True)
    with cols[4]:
        st.markdown(f'<div class="outcome-card">Outcome<br><b>{report.outcome.value}</b></div>',
                    unsafe_allow_html=True)

    if report.errors:
        st.dataframe(
            [{'code': error.code.value, 'detail': error.detail,
              'location': f"{error.location[0]}:{error.location[1]}" if error.location else ''}
             for error in report.errors],
            use_container_width=True
        )

    path = None
    if report.correct:
        try:
            engine = GridEngine(report.spec)
            result = engine.solve(report.level, int(max_steps))
            if result.verdict is SolveVerdict.WINNABLE:
                st.success(f"Winnable in {result.steps} steps: {' '.join(a.value for a in result.actions)}")
                path = avatar_path(engine, report.level, result.actions)
            else:
                st.warning(f"Solver verdict: {result.verdict.value}")
        except EngineError as e:
            logger.warning(f"Engine rejected game: {e}")
            st.info(f"Engine cannot run this game: {e}")

    if report.level is not None:
        fig = create_level_figure(report.level, report.spec, path)
        st.plotly_chart(fig, use_container_width=True)
