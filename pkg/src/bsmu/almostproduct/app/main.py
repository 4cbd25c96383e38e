import sys

from bsmu.almostproduct.app import AlmostProductApp


def run_app():
    app = AlmostProductApp()
    sys.exit(app.run())


if __name__ == '__main__':
    run_app()
