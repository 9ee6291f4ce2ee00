# Core models and components
