import sys


## main wrapper program
def run_vr():
    """
    run the vr command line
    """
    from .cli import main
    sys.exit(main())
