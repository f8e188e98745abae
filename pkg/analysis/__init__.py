"""
Analysis kernels: temporal, engagement, geospatial, content mining, topics, sentiment, statistics
"""
