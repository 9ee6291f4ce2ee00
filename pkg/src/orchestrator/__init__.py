# Orchestrator components
