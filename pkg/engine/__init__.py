"""
Engine package
Risk, sensitivity and coherence engines, the report builder and the property suite
"""
