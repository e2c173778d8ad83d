# panic_forecast_tool/profile/__init__.py
# All comments and identifiers in English
