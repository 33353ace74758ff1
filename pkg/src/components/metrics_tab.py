"""
Degree-of-anonymity tables tab.
"""

import pandas as pd
import streamlit as st
from ..core.metrics import aggregator_sweep, emit_anonymity_tables, published_values_check
from ..utils.ui_helpers import format_degree, render_feature_card, render_status_card

class MetricsTab:
    """Entropy tables, the golden comparison and the aggregator sweep."""

    def render(self):
        """Render the metrics tab."""
        st.markdown("### 📊 Degree of Anonymity")
        render_feature_card(
            "📐 How anonymous is a split reading?",
            "An aggregator that sees one share cannot tell which of the m splits it holds. "
            "The degree of anonymity compares the entropy of the attacker's guess with its maximum."
        )

        tables = emit_anonymity_tables()
        mismatches = published_values_check(tables)
        if mismatches:
            render_status_card("🔴 Tables differ from the published values", mismatches[0], "error")
        else:
            render_status_card("🟢 Tables reproduced", "Every cell matches the published values.", "status")

        col1, col2 = st.columns(2)
        with col1:
            st.markdown("#### Equal probability")
            st.dataframe(self._split_frame(tables.equal), hide_index=True, use_container_width=True)
        with col2:
            st.markdown("#### Variable probability")
            st.dataframe(self._split_frame(tables.variable), hide_index=True, use_container_width=True)

        st.markdown("#### Probability of a user being the originator")
        users = pd.DataFrame([{"n": r.n, "P_user": f"{r.probability:.2f}"} for r in tables.users])
        st.dataframe(users, hide_index=True)
        st.info(f"💡 Recommended number of aggregators: **{tables.recommended_aggregators}**")

        self._render_sweep()

    def _split_frame(self, rows) -> pd.DataFrame:
        return pd.DataFrame([
            {
                "m": r.m,
                "P_i": ", ".join(f"{p:.2f}" for p in r.probabilities),
                "H(ES)": f"{r.entropy:.2f}",
                "H(MaxES)": f"{r.max_entropy:.2f}",
                "d_a": format_degree(r.degree),
            }
            for r in rows
        ])

    def _render_sweep(self):
        with st.expander("📈 Aggregator sweep"):
            max_m = st.slider("Largest m", min_value=3, max_value=20, value=10)
            sweep = pd.DataFrame(aggregator_sweep(max_m), columns=["m", "uniform", "decremental"])
            st.line_chart(sweep.set_index("m"))
