"""Punto de entrada de la API de resultados para desarrollo local."""

from src import create_app

app = create_app()


if __name__ == "__main__":
    app.run(debug=True)
