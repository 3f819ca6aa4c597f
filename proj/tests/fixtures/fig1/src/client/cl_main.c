/* cl_main.c */
