"""Module that allows the user to run `python -m bsmu.almostproduct.app`."""


from bsmu.almostproduct.app.main import run_app

if __name__ == '__main__':
    run_app()
