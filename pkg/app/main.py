from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.exceptions import RequestValidationError

from app.config import settings
from app.api import bribery, darkdao, transforms, vbe
from app.utils.exceptions import (
    VBELabException,
    vbe_lab_exception_handler,
    validation_exception_handler,
    general_exception_handler
)
from app.utils.log import configure_logging

configure_logging(settings.log_level)

app = FastAPI(
    title="VBE Lab API",
    description="Voting-bloc entropy metrics, bribery economics and Dark DAO simulation",
    version="1.0.0",
    docs_url="/docs" if settings.debug else None,
    redoc_url="/redoc" if settings.debug else None
)

# CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.cors_origins,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Exception handlers
app.add_exception_handler(VBELabException, vbe_lab_exception_handler)
app.add_exception_handler(RequestValidationError, validation_exception_handler)
app.add_exception_handler(Exception, general_exception_handler)

# Include routers
app.include_router(vbe.router, prefix="/vbe", tags=["Metrics"])
app.include_router(transforms.router, prefix="/transforms", tags=["Transformations"])
app.include_router(bribery.router, prefix="/bribery", tags=["Bribery"])
app.include_router(darkdao.router, prefix="/darkdao", tags=["Dark DAO"])


@app.get("/")
async def root():
    return {
        "message": "VBE Lab API",
        "version": "1.0.0",
        "status": "healthy"
    }


@app.get("/health")
async def health_check():
    """Health check, no state involved"""
    return {
        "status": "healthy",
        "service": "vbe-lab"
    }


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(
        "app.main:app",
        host="0.0.0.0",
        port=8000,
        reload=settings.debug
    )
