"""
Sidebar component for the DTBAS dashboard.
"""

import streamlit as st
from typing import Optional
from ..core.errors import DomainError
from ..core.model import ShareScheme, SimConfig, anonymity_set_size, node_count
from ..config import Config
from ..utils.ui_helpers import render_status_card

class Sidebar:
    """Sidebar component for the simulation parameters."""

    def __init__(self):
        self.config = Config()

    def render(self) -> Optional[SimConfig]:
        """Render the sidebar and return the chosen configuration.

        Returns:
            The validated SimConfig, or None when the inputs are invalid
        """
        with st.sidebar:
            st.markdown("### ⚙️ Configuration")

            n_meters = st.number_input("Smart meters (n)", min_value=3, max_value=500,
                                       value=max(3, self.config.N_METERS), step=1)
            m_aggregators = st.number_input("Aggregators (m)", min_value=3, max_value=10,
                                            value=max(3, self.config.M_AGGREGATORS), step=1)
            schemes = [s.value for s in ShareScheme]
            scheme = st.selectbox("Share scheme", schemes, index=schemes.index(self.config.SCHEME),
                                  help="Equal split leaks each reading to every aggregator; "
                                       "additive random shares do not.")
            seed = st.number_input("Seed", min_value=0, value=self.config.SEED, step=1)

            try:
                sim_config = SimConfig(n_meters=int(n_meters), m_aggregators=int(m_aggregators),
                                       scheme=scheme, modulus=self.config.MODULUS, seed=int(seed),
                                       intervals_per_period=self.config.INTERVALS_PER_PERIOD)
            except DomainError as e:
                render_status_card("🔴 Invalid configuration", str(e), "error")
                return None

            self._render_topology(sim_config)

            st.markdown("---")
            if st.button("🗑️ Clear Results", type="secondary", use_container_width=True):
                for key in ("simulation", "attack_report", "game_transcript"):
                    st.session_state.pop(key, None)
                st.rerun()

            return sim_config

    def _render_topology(self, sim_config: SimConfig):
        """Render node counts for the chosen configuration."""
        st.markdown("---")
        st.markdown("### 📊 Topology")

        col1, col2 = st.columns(2)
        with col1:
            st.metric("Nodes", node_count(sim_config))
        with col2:
            st.metric("Anonymity set", anonymity_set_size(sim_config))

        render_status_card(
            "🟢 Ready",
            f"Each reading is split into {sim_config.m_aggregators} shares "
            f"({sim_config.scheme.value}).",
            "status"
        )
