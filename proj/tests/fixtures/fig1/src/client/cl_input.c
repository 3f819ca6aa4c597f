/* cl_input.c */
