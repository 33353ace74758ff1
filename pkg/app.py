"""
Main Streamlit application for the DTBAS simulator.

Interactive dashboard for distributed trust based anonymous aggregation of
smart-meter readings: anonymity tables, end-to-end simulation, attacker
evaluation and the distinguishing game.
"""

import streamlit as st
from src.config import Config
from src.components import Sidebar, MetricsTab, SimulateTab, AttackTab, GameTab, HelpTab
from src.utils import apply_custom_css, configure_logging, render_main_header

def main():
    """Main application function."""
    # Configure Streamlit page
    st.set_page_config(
        page_title=Config.APP_TITLE,
        page_icon=Config.APP_ICON,
        layout="wide",
        initial_sidebar_state="expanded"
    )

    # Validate configuration
    try:
        Config.validate_config()
    except ValueError as e:
        st.error(f"Configuration Error: {e}")
        st.stop()

    configure_logging(Config.LOG_LEVEL)

    # Apply custom styling
    apply_custom_css()

    # Render main header
    render_main_header()

    # Initialize components
    sidebar = Sidebar()
    metrics_tab = MetricsTab()
    simulate_tab = SimulateTab()
    attack_tab = AttackTab()
    game_tab = GameTab()
    help_tab = HelpTab()

    # Render sidebar and get the simulation parameters
    sim_config = sidebar.render()

    # Main content area with tabs
    tab1, tab2, tab3, tab4, tab5 = st.tabs(["📊 Anonymity Tables", "⚡ Simulate", "🕵️ Attack", "🎲 Game", "📋 Help"])

    with tab1:
        metrics_tab.render()

    with tab2:
        simulate_tab.render(sim_config)

    with tab3:
        attack_tab.render()

    with tab4:
        game_tab.render(sim_config)

    with tab5:
        help_tab.render()

if __name__ == "__main__":
    main()
