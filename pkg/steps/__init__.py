"""
Pipeline steps, one module per subcommand (each defines a class named Step)
"""
