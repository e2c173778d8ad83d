# panic_forecast_tool/llm_gateway/__init__.py
# All comments and identifiers in English
