# panic_forecast_tool/metrics/__init__.py
# All comments and identifiers in English
