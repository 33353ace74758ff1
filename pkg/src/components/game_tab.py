"""
Distinguishing game tab.
"""

import streamlit as st
from typing import Optional
from ..core.errors import DTBASError
from ..core.game import Distinguisher, Observable, Strategy, expected_band, run_game
from ..core.model import SimConfig
from ..config import Config
from ..utils.ui_helpers import render_feature_card, render_status_card

# strategy -> observables it can run on
COMPATIBLE = {
    Strategy.RANDOM_GUESS: list(Observable),
    Strategy.COLUMN_SUM_MATCHER: [Observable.SINGLE_AGGREGATOR, Observable.ALL_AGGREGATORS],
    Strategy.TOTAL_SUM_MATCHER: [Observable.SUPPLIER_TOTALS],
}

class GameTab:
    """Repeated trials of the distinguishing game."""

    def __init__(self):
        self.config = Config()

    def render(self, sim_config: Optional[SimConfig]):
        """Render the game tab.

        Args:
            sim_config: Configuration chosen in the sidebar
        """
        st.markdown("### 🎲 Distinguishing Game")
        render_feature_card(
            "🎲 Can the adversary tell two households apart?",
            "The challenger hides one of two load profiles among the other meters. The adversary "
            "wins when it names the hidden profile; a success rate near 0.5 means the scheme hides it."
        )
        if sim_config is None:
            st.warning("Fix the configuration in the sidebar first.")
            return

        col1, col2 = st.columns(2)
        with col1:
            strategy = Strategy(st.selectbox("Strategy", [s.value for s in Strategy], index=1))
        with col2:
            observable = Observable(st.selectbox("Observable", [o.value for o in COMPATIBLE[strategy]]))

        col1, col2 = st.columns(2)
        with col1:
            trials = st.number_input("Trials", min_value=10, max_value=self.config.GAME_TRIALS,
                                     value=min(self.config.UI_GAME_TRIALS_DEFAULT, self.config.GAME_TRIALS))
        with col2:
            round_length = st.number_input("Round length (intervals)", min_value=1, max_value=2880,
                                           value=self.config.ROUND_LENGTH)

        if st.button("🎲 Play", type="primary", use_container_width=True):
            distinguisher = Distinguisher(strategy, observable)
            with st.spinner(f"Playing {int(trials)} trials..."):
                try:
                    transcript = run_game(distinguisher, sim_config.n_meters, int(trials), sim_config,
                                          sim_config.seed, round_length=int(round_length),
                                          workers=self.config.GAME_WORKERS)
                except DTBASError as e:
                    st.error(f"Game failed: {e}")
                    return
            st.session_state.game_transcript = (transcript, expected_band(distinguisher, sim_config.scheme,
                                                                          int(trials)))

        stored = st.session_state.get("game_transcript")
        if stored is not None:
            self._render_transcript(*stored)

    def _render_transcript(self, transcript, band):
        col1, col2, col3 = st.columns(3)
        with col1:
            st.metric("Success rate", f"{transcript.success_rate:.4f}")
        with col2:
            st.metric("Advantage", f"{transcript.advantage:.4f}")
        with col3:
            st.metric("Trials", transcript.trials)

        if band is None:
            st.info("No acceptance band is defined for this configuration.")
        else:
            violation = band.check(transcript)
            if violation:
                render_status_card("🔴 Outside the expected band", violation, "error")
            else:
                render_status_card("🟢 Within the expected band", transcript.summary(), "status")

        with st.expander("Transcript metadata"):
            st.json(transcript.metadata)
