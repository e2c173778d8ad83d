# panic_forecast_tool/agent/__init__.py
# All comments and identifiers in English
