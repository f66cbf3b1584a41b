# Makes sgfrwt a Python package
