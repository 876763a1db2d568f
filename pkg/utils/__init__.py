"""
Utils package
Contains distributions, spectra, quadrature, configuration, file I/O and output formatting
"""
