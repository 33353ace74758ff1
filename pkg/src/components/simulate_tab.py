"""
Simulation tab: runs one billing period end to end.
"""

import pandas as pd
import streamlit as st
from typing import Optional
from ..core.errors import DTBASError
from ..core.model import SimConfig, interval_schedule
from ..core.simulation import AggregationSimulation
from ..config import Config
from ..utils.ui_helpers import format_energy, render_feature_card, render_status_card

class SimulateTab:
    """Split, aggregate, collect and bill with generated load profiles."""

    def __init__(self):
        self.config = Config()

    def render(self, sim_config: Optional[SimConfig]):
        """Render the simulation tab.

        Args:
            sim_config: Configuration chosen in the sidebar
        """
        st.markdown("### ⚡ Simulate a Billing Period")
        render_feature_card(
            "⚡ Meter → Aggregators → Supplier",
            "Every reading is split into shares, one per aggregator. The supplier only sees "
            "interval totals and one bill per meter for the whole period."
        )
        if sim_config is None:
            st.warning("Fix the configuration in the sidebar first.")
            return

        intervals = st.number_input("Intervals (15 minutes each)", min_value=1,
                                    max_value=sim_config.intervals_per_period,
                                    value=min(self.config.UI_INTERVALS_DEFAULT, sim_config.intervals_per_period))

        if st.button("▶️ Run Simulation", type="primary", use_container_width=True):
            with st.spinner("Splitting and aggregating readings..."):
                try:
                    result = AggregationSimulation(sim_config, n_intervals=int(intervals)).run()
                except DTBASError as e:
                    st.error(f"Simulation failed: {e}")
                    return
            st.session_state.simulation = result
            st.session_state.pop("attack_report", None)

        result = st.session_state.get("simulation")
        if result is None:
            st.info("Press **Run Simulation** to start.")
            return
        self._render_result(result)

    def _render_result(self, result):
        report = result.to_report()
        col1, col2, col3 = st.columns(3)
        with col1:
            st.metric("Meters", result.config.n_meters)
        with col2:
            st.metric("Intervals", result.n_intervals)
        with col3:
            st.metric("Total energy", format_energy(int(result.readings.sum())))

        if result.conservation_ok and report["bills_match_plaintext"]:
            render_status_card("🟢 Conservation holds",
                               "Supplier totals and bills equal the plaintext sums.", "status")
        else:
            render_status_card("🔴 Conservation failed",
                               f"Intervals: {result.conservation_failures[:10]}", "error")

        st.markdown("#### Interval totals seen by the supplier")
        schedule = interval_schedule(result.n_intervals)
        totals = pd.DataFrame({
            "elapsed": [row["label"] for row in schedule],
            "total_wh": [result.supplier.interval_totals[t] for t in range(result.n_intervals)],
        })
        st.line_chart(totals, x="elapsed", y="total_wh")

        st.markdown("#### Bills")
        bills = pd.DataFrame([
            {"meter": int(meter), "billed": format_energy(energy)}
            for meter, energy in sorted(result.bills.items())
        ])
        st.dataframe(bills, hide_index=True, use_container_width=True)
