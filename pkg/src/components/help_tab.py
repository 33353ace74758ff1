"""
Help tab component.
"""

import streamlit as st
from ..utils.ui_helpers import render_feature_card

class HelpTab:
    """Help and documentation tab component."""

    def render(self):
        """Render the help tab."""
        st.markdown("### 📋 Help & Documentation")

        render_feature_card(
            "🔌 Welcome to the DTBAS Simulator",
            "Smart meters split every 15-minute reading into shares sent to several aggregators. "
            "No single aggregator can link a reading to a household, yet the supplier still gets "
            "exact totals and exact monthly bills."
        )

        self._render_how_it_works()
        self._render_schemes()
        self._render_attackers()
        self._render_command_line()
        self._render_footer()

    def _render_how_it_works(self):
        """Render how it works section."""
        with st.expander("🔍 How It Works", expanded=True):
            st.markdown("""
            **1. Splitting**
            - Each meter splits its reading into m shares, one per aggregator
            - Shares of one reading add up to the reading modulo a large prime

            **2. Aggregation**
            - Each aggregator sums the shares of all meters for an interval
            - Only that column sum leaves the aggregator

            **3. Supplier**
            - Adding the m column sums gives the interval total of the whole neighbourhood
            - At the end of the billing period each aggregator releases one share sum per meter,
              and the supplier rebuilds the bill without seeing any single interval
            """)

    def _render_schemes(self):
        """Render share scheme section."""
        with st.expander("🧮 Share Schemes"):
            st.markdown("""
            **naive-equal-split**
            - Every aggregator receives roughly a third of the reading
            - Multiplying one share by m recovers the reading: one compromised aggregator is enough

            **additive-random**
            - m-1 shares are uniformly random, the last one completes the sum
            - Any m-1 shares are independent of the reading
            """)

    def _render_attackers(self):
        """Render attacker models section."""
        with st.expander("🕵️ Attacker Models"):
            st.markdown("""
            **Active attacker**
            - Controls one or two aggregators and sees their full ledgers
            - With one aggregator out of three it holds a third of all shares

            **Passive attacker**
            - Eavesdrops on every aggregator link
            - Must break the transport encryption first, which takes a configurable number of hours
              (`DTBAS_DECRYPTION_DELAY_HOURS`)

            **Degree of anonymity**
            - 1.0 means every meter is an equally likely originator; 0.0 means the originator is known
            """)

    def _render_command_line(self):
        """Render command line section."""
        with st.expander("💻 Command Line"):
            st.code("""python cli.py metrics-table --check
python cli.py simulate --n-meters 10 --intervals 96
python cli.py attack --kind active --compromised 0 --scheme naive-equal-split
python cli.py --out game.json game --trials 5000 --assert-band""", language="bash")

    def _render_footer(self):
        """Render footer section."""
        st.markdown("---")
        st.markdown("""
        <div style="text-align: center; color: #666; padding: 20px;">
            <p>🔌 DTBAS Simulator</p>
            <p>Built with Streamlit, NumPy and SciPy</p>
        </div>
        """, unsafe_allow_html=True)
