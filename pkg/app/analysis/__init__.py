"""数值分析模块：结构检验、剖面、无粘稳定性、Evans 函数、低频分析与时间演化"""
