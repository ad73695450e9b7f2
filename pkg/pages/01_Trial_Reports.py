"""
Trial Reports Page for VGDL Forge
"""

import logging
import os
import sys
import tempfile
from pathlib import Path

import streamlit as st

# Add utils to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'utils'))

from catalog import get_preset_description, get_preset_list
from provider_manager import load_provider_configs, providers_file
from trial_harness import HarnessAbort, load_journal, render, run_trials, tabulate
from visualization import (
    create_error_heatmap,
    create_outcome_chart,
    create_provider_share_chart,
    create_verdict_chart,
    error_frame,
    records_frame,
)

logger = logging.getLogger(__name__)

st.set_page_config(
    page_title="Trial Reports - VGDL Forge",
    page_icon="📊",
    layout="wide"
)

st.title("📊 Trial Reports")
st.markdown("Run generation trials per provider and preset, then compare verdicts, errors and outcome classes")

# Sidebar parameters
st.sidebar.header("Experiment")

source = st.sidebar.radio("Records", ["Run trials", "Load journal"])

if 'records' not in st.session_state:
    st.session_state.records = []

if source == "Run trials":
    config_path = st.sidebar.text_input("Providers file", value=str(providers_file()))
    try:
        configs = load_provider_configs(config_path)
    except Exception as e:
        logger.error(f"Cannot load providers: {str(e)}")
        st.sidebar.error(f"Cannot load providers: {e}")
        configs = []

    names = [config.name for config in configs]
    chosen = st.sidebar.multiselect("Providers", names, default=names)
    presets = st.sidebar.multiselect(
        "Presets",
        get_preset_list(),
        default=get_preset_list(),
        format_func=lambda p: f"{p}: {get_preset_description(p)}"
    )
    trials = st.sidebar.number_input("Trials per pair", min_value=1, value=10, step=1)
    game_name = st.sidebar.text_input("Game", value="a maze game")

    if st.sidebar.button("▶️ Run", type="primary", disabled=not (chosen and presets)):
        journal = Path(tempfile.gettempdir()) / "vgdl_forge_journal.jsonl"
        with st.spinner("Running trials..."):
            try:
                st.session_state.records = run_trials(
                    presets,
                    [config for config in configs if config.name in chosen],
                    int(trials),
                    game_name=game_name,
                    journal_path=journal,
                )
            except HarnessAbort as e:
                st.error(str(e))
                st.session_state.records = []
else:
    journal_path = st.sidebar.text_input("Journal", value="runs/journal.jsonl")
    if st.sidebar.button("📂 Load"):
        st.session_state.records = load_journal(journal_path)
        if not st.session_state.records:
            st.sidebar.warning("No records found")

records = st.session_state.records
if not records:
    st.info("Run trials or load a journal to see reports.")
    st.stop()

table = tabulate(records)
for problem in table.check():
    st.warning(problem)

tab1, tab2, tab3, tab4 = st.tabs([
    "✅ Verdicts",
    "🔥 Errors",
    "🎯 Outcomes",
    "📄 Records"
])

with tab1:
    st.header("Parsable, Logical, Mappable and Correct Counts")
    st.plotly_chart(create_verdict_chart(table), use_container_width=True)
    st.code(render(table, 'text').decode('utf-8'), language=None)

with tab2:
    st.header("Errors in Generated Rules and Levels")
    st.plotly_chart(create_error_heatmap(table), use_container_width=True)
    st.dataframe(error_frame(table), use_container_width=True)

with tab3:
    st.header("Outcome Classes")
    col1, col2 = st.columns(2)
    with col1:
        st.plotly_chart(create_outcome_chart(table), use_container_width=True)
    with col2:
        st.plotly_chart(create_provider_share_chart(table), use_container_width=True)

with tab4:
    st.header("Trial Records")
    st.dataframe(records_frame(records), use_container_width=True)
    st.download_button(
        "Download TSV report",
        data=render(table, 'tsv'),
        file_name="report.tsv",
        mime="text/tab-separated-values"
    )
