"""
Attack tab: what compromised aggregators learn from the last simulation.
"""

import pandas as pd
import streamlit as st
from ..core.adversary import AttackerModel, AttackKind, run_attack
from ..core.errors import DTBASError
from ..config import Config
from ..utils.ui_helpers import format_degree, render_feature_card, render_status_card

class AttackTab:
    """Active and passive attacker evaluation."""

    def __init__(self):
        self.config = Config()

    def render(self):
        """Render the attack tab."""
        st.markdown("### 🕵️ Attack the Aggregators")
        render_feature_card(
            "🕵️ Active and passive attackers",
            "An active attacker controls one or two aggregators. A passive attacker eavesdrops on "
            "every aggregator but must first break the transport encryption."
        )

        result = st.session_state.get("simulation")
        if result is None:
            st.info("Run a simulation in the **Simulate** tab first.")
            return
        m = result.config.m_aggregators

        kind = st.radio("Attacker", [k.value for k in AttackKind], horizontal=True)
        if kind == AttackKind.ACTIVE.value:
            compromised = st.multiselect("Compromised aggregators", list(range(m)), default=[0],
                                         max_selections=2)
        else:
            compromised = list(range(m))
        target = st.number_input("Target meter", min_value=0, max_value=result.config.n_meters - 1, value=0)

        if st.button("🎯 Run Attack", type="primary", use_container_width=True):
            try:
                model = (AttackerModel.active(*compromised) if kind == AttackKind.ACTIVE.value
                         else AttackerModel.passive(m))
                st.session_state.attack_report = run_attack(result, model, int(target),
                                                            self.config.DECRYPTION_DELAY_HOURS)
            except DTBASError as e:
                st.error(f"Attack failed: {e}")
                return

        report = st.session_state.get("attack_report")
        if report is not None:
            self._render_report(report)

    def _render_report(self, report: dict):
        col1, col2, col3 = st.columns(3)
        with col1:
            st.metric("Information gained", f"{report['information_gain_fraction']:.0%}")
        with col2:
            st.metric("Visible cells", report["visible_cells"])
        with col3:
            st.metric("Degree of anonymity", format_degree(report["anonymity"]["degree"]))

        passive = report.get("passive")
        if passive:
            render_status_card(
                "🟠 Full reconstruction" if passive["full_reconstruction"] else "🟡 Partial view",
                f"Only after roughly {passive['decryption_delay_hours']:g} hours spent breaking the "
                f"encryption of every aggregator link.",
                "warning"
            )

        comparison = report["gained_vs_needed"]
        if comparison:
            st.markdown("#### Gained versus needed")
            st.write(f"The attacker holds the column total **{comparison['gained']}** but needs the "
                     f"row total **{comparison['needed']}** of meter {report['target']}.")

        self._render_information_matrix(report["information_matrix"])

        st.markdown("#### Reading estimates (first interval)")
        estimates = pd.DataFrame(report["estimates"])
        st.dataframe(estimates, hide_index=True, use_container_width=True)

        st.markdown("#### Who produced the target's readings?")
        probabilities = pd.DataFrame({"meter": range(len(report["user_probabilities"])),
                                      "probability": report["user_probabilities"]})
        st.bar_chart(probabilities, x="meter", y="probability")

    def _render_information_matrix(self, matrix: dict):
        st.markdown("#### Information the attacker can gain")
        visible = set(matrix["visible_aggregators"])
        labels = [f"A{a} 👁" if a in visible else f"A{a}" for a in range(len(matrix["column_totals"]))]
        rows = [{"meter": f"SM{row['meter']}", **dict(zip(labels, row["shares"])), "needed": row["row_total"]}
                for row in matrix["rows"]]
        rows.append({"meter": "gained", **dict(zip(labels, matrix["column_totals"])), "needed": None})
        frame = pd.DataFrame(rows).astype({column: "Int64" for column in [*labels, "needed"]})
        st.dataframe(frame, hide_index=True, use_container_width=True)
        st.caption("👁 marks compromised aggregators. Each meter needs its row total; "
                   "the attacker only gains the column totals of the marked aggregators.")
